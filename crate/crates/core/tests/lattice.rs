use std::collections::BTreeSet;

use nqh_core::lattice::{
    dimension, enumerate_basis, in_region, level_columns, level_rows, max_level,
    parameter_indices, scan_region, Family,
};
use proptest::prelude::*;

#[test]
fn counts_agree_with_closed_formula() {
    for m in 2..=12 {
        for n in 2..=12 {
            let d = dimension(m, n).unwrap();
            assert_eq!(enumerate_basis(m, n).unwrap().len(), d, "basis ({m},{n})");
            assert_eq!(parameter_indices(m, n).unwrap().len(), d, "params ({m},{n})");
            assert_eq!(scan_region(m, n).len(), d, "scan ({m},{n})");
        }
    }
}

#[test]
fn levels_partition_the_region() {
    for m in 2..=8 {
        for n in 2..=8 {
            let from_levels: Vec<(i64, i64)> = enumerate_basis(m, n)
                .unwrap()
                .iter()
                .map(|b| (b.i, b.j))
                .collect();
            let set: BTreeSet<_> = from_levels.iter().copied().collect();
            assert_eq!(set.len(), from_levels.len(), "duplicates at ({m},{n})");
            let scan: BTreeSet<_> = scan_region(m, n).into_iter().collect();
            assert_eq!(set, scan, "({m},{n})");
        }
    }
}

#[test]
fn rows_match_columns_per_level() {
    for m in 2..=8 {
        for n in 2..=8 {
            let mut cols = BTreeSet::new();
            for k in 1..=max_level(m, n) {
                let r = level_rows(m, n, k).unwrap();
                let c = level_columns(m, n, k).unwrap();
                assert_eq!(r.len(), c.len(), "({m},{n}) level {k}");
                assert!(c.iter().all(|p| p.k == k));
                cols.extend(c);
            }
            let all: BTreeSet<_> = parameter_indices(m, n).unwrap().into_iter().collect();
            assert_eq!(cols, all);
        }
    }
}

#[test]
fn level_sizes_follow_the_stated_counts() {
    for m in 3..=8usize {
        for n in 3..=8usize {
            for k in 1..=max_level(m, n) {
                let want = if k == 1 {
                    (n - 1) + (m - 2)
                } else if k < n {
                    (n - k) + (m - 2)
                } else {
                    nqh_core::lattice::q_k(m, n, k)
                };
                assert_eq!(level_rows(m, n, k).unwrap().len(), want);
            }
        }
    }
}

proptest! {
    // The four-line description of the parameter set is implied by the product's summation bounds.
    #[test]
    fn parameter_inequalities_are_implied(m in 2usize..10, n in 2usize..10) {
        for p in parameter_indices(m, n).unwrap() {
            let (k, i) = (p.k as i64, p.i as i64);
            let (mm, nn) = (m as i64, n as i64);
            match p.family {
                Family::A => {
                    prop_assert!(k >= 1 && k <= i && i < nn);
                    prop_assert!(k < nn);
                }
                Family::B => {
                    prop_assert!(i >= 1 && i <= mm - 2);
                    prop_assert!(k >= 1 && k <= nn - 1 + 2 * i);
                    prop_assert!(k <= nn + 2 * mm - 5);
                }
            }
        }
    }

    #[test]
    fn every_row_is_in_the_region(m in 2usize..10, n in 2usize..10) {
        for b in enumerate_basis(m, n).unwrap() {
            prop_assert!(in_region(m, n, b.i, b.j));
            prop_assert!(b.i >= 0 || b.j >= 0);
        }
    }
}
