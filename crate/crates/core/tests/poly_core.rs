use nqh_core::poly_core::{expand_quotient, Monomial, Var, Vars};
use nqh_core::scalar::{int, rat};
use nqh_core::{QLaurent, QMatrix, QPoly, QRatFunc, QSeries, Rational};
use proptest::prelude::*;

fn poly(cs: &[i64]) -> QPoly {
    QPoly::from_ints(cs)
}

fn laurent(terms: &[((i64, i64), i64)]) -> QLaurent {
    QLaurent::from_terms(Vars::XY, terms.iter().map(|&(e, c)| (e, int(c))))
}

fn arb_poly(max_deg: usize) -> impl Strategy<Value = QPoly> {
    prop::collection::vec(-6i64..=6, 1..=max_deg + 1).prop_map(|cs| QPoly::from_ints(&cs))
}

fn arb_laurent() -> impl Strategy<Value = QLaurent> {
    prop::collection::vec(((-3i64..=3, -3i64..=3), -5i64..=5), 0..6).prop_map(|ts| {
        QLaurent::from_terms(Vars::XY, ts.into_iter().map(|(e, c)| (e, int(c))))
    })
}

fn arb_matrix(n: usize) -> impl Strategy<Value = QMatrix> {
    prop::collection::vec(-9i64..=9, n * n).prop_map(move |v| {
        QMatrix::from_fn(n, n, |i, j| int(v[i * n + j]))
    })
}

#[test]
fn extended_gcd_small_cases() {
    let (g, s, t) = poly(&[0, 2]).extended_gcd(&poly(&[0, 0, 1])).unwrap();
    assert_eq!(g, QPoly::x());
    assert_eq!(&(&s * &poly(&[0, 2])) + &(&t * &poly(&[0, 0, 1])), g);

    let (g, s, t) = poly(&[1, 1]).extended_gcd(&poly(&[-1, 1])).unwrap();
    assert_eq!(g, QPoly::one());
    assert_eq!(s, QPoly::constant(rat(1, 2)));
    assert_eq!(t, QPoly::constant(rat(-1, 2)));
}

#[test]
fn extended_gcd_sextic() {
    let q = &QPoly::monomial(int(1), 6) * &poly(&[1, 3, 2]);
    let dq = q.derivative();
    let (g, s, t) = dq.extended_gcd(&q).unwrap();
    assert_eq!(g, QPoly::monomial(int(1), 5));
    assert_eq!(&(&s * &dq) + &(&t * &q), g);
    assert!(q.rem(&g).unwrap().is_zero());
    assert!(dq.rem(&g).unwrap().is_zero());
}

#[test]
fn laurent_windows() {
    let r = QRatFunc::new(QPoly::one(), poly(&[1, 2])).unwrap();
    assert_eq!(r.laurent_expand(0, 2).unwrap(), vec![int(1), int(-2), int(4)]);

    let r = QRatFunc::new(poly(&[1, 1]), poly(&[0, 0, 1])).unwrap();
    assert_eq!(r.laurent_expand(-2, 0).unwrap(), vec![int(1), int(1), int(0)]);

    let r = QRatFunc::new(poly(&[0, 0, 0, 1]), poly(&[1, 2, 1])).unwrap();
    let got = r.laurent_expand(3, 5).unwrap();
    assert_eq!(got, vec![int(1), int(-2), int(3)]);
    // (1+x)^2 (1 - 2x + 3x^2) = 1 + 0x + 0x^2 + O(x^3)
    let back = &poly(&[1, 2, 1]) * &poly(&[1, -2, 3]);
    assert_eq!(&back.coeffs()[..3], &[int(1), int(0), int(0)]);
}

#[test]
fn monomial_substitutions() {
    let v4 = Vars("x4", "y4");
    let f = laurent(&[((1, 1), 1)]);
    let g = f
        .substitute_monomial(&Monomial::unit(1, 1), &Monomial::unit(1, 2), v4)
        .unwrap();
    assert_eq!(g, QLaurent::monomial(v4, int(1), 2, 3));

    let y3 = laurent(&[((0, 1), 1)]);
    let g = y3
        .substitute_monomial(&Monomial::unit(1, 1), &Monomial::unit(-1, 0), v4)
        .unwrap();
    assert_eq!(g, QLaurent::monomial(v4, int(1), -1, 0));

    let f = laurent(&[((2, 1), 1)]);
    let g = f
        .substitute_monomial(&Monomial::unit(0, -1), &Monomial::unit(1, 2), v4)
        .unwrap();
    assert_eq!(g, QLaurent::monomial(v4, int(1), 1, 0));
}

#[test]
fn determinants() {
    assert_eq!(QMatrix::identity(3).det().unwrap(), int(1));
    let swap = QMatrix::from_rows(vec![vec![int(0), int(1)], vec![int(1), int(0)]]).unwrap();
    assert_eq!(swap.det().unwrap(), int(-1));
    let v = QMatrix::from_fn(4, 4, |i, j| int(i as i64 + 1).pow(j as i32));
    assert_eq!(v.det().unwrap(), int(12));
    assert!(QMatrix::zeros(2, 3).det().is_err());
}

#[test]
fn quotient_expansion_reproduces_numerator() {
    let den = laurent(&[((1, 0), 3), ((0, 1), 1), ((2, 1), -2), ((-1, 2), 1)]);
    let num = laurent(&[((0, 0), 1), ((-2, 1), 4), ((1, 3), -1)]);
    let prod = &num * &den;
    let e = expand_quotient(&prod, &den, Var::Second, 4, 5, 2).unwrap();
    for i in -6..=5 {
        for j in 0..=4 {
            assert_eq!(e.coeff(i, j).unwrap(), num.coeff(i, j), "({i}, {j})");
        }
    }
}

proptest! {
    #[test]
    fn bezout_identity(a in arb_poly(5), b in arb_poly(5)) {
        prop_assume!(!a.is_zero() || !b.is_zero());
        let (g, s, t) = a.extended_gcd(&b).unwrap();
        prop_assert_eq!(&(&s * &a) + &(&t * &b), g.clone());
        prop_assert_eq!(g.leading().cloned(), Some(int(1)));
        if !a.is_zero() {
            prop_assert!(a.rem(&g).unwrap().is_zero());
        }
        if !b.is_zero() {
            prop_assert!(b.rem(&g).unwrap().is_zero());
        }
    }

    #[test]
    fn division_with_remainder(a in arb_poly(6), b in arb_poly(3)) {
        prop_assume!(!b.is_zero());
        let (q, r) = a.div_rem(&b).unwrap();
        prop_assert_eq!(&(&q * &b) + &r, a);
        prop_assert!(r.degree().is_none_or(|d| d < b.degree().unwrap()));
    }

    #[test]
    fn laurent_ring_laws(f in arb_laurent(), g in arb_laurent(), h in arb_laurent()) {
        prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
        prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
        prop_assert!((&f - &f).is_zero());
    }

    #[test]
    fn laurent_exact_division(f in arb_laurent(), g in arb_laurent()) {
        prop_assume!(!g.is_zero());
        let fg = &f * &g;
        prop_assert_eq!(fg.div_exact(&g).unwrap(), f);
    }

    #[test]
    fn substitution_is_a_ring_map(
        f in arb_laurent(),
        g in arb_laurent(),
        e in prop::array::uniform4(-2i64..=2),
        c in 1i64..=4,
    ) {
        let m1 = Monomial::new(int(c), e[0], e[1]);
        let m2 = Monomial::new(rat(1, c), e[2], e[3]);
        let v = Vars("u", "v");
        let sub = |p: &QLaurent| p.substitute_monomial(&m1, &m2, v).unwrap();
        prop_assert_eq!(sub(&(&f * &g)), &sub(&f) * &sub(&g));
        prop_assert_eq!(sub(&(&f + &g)), &sub(&f) + &sub(&g));
    }

    #[test]
    fn bareiss_matches_cofactor_expansion(m in arb_matrix(4)) {
        prop_assert_eq!(m.det().unwrap(), m.det_cofactor().unwrap());
    }

    #[test]
    fn determinant_is_multiplicative(a in arb_matrix(3), b in arb_matrix(3)) {
        let ab = a.mul(&b).unwrap();
        prop_assert_eq!(ab.det().unwrap(), a.det().unwrap() * b.det().unwrap());
    }

    #[test]
    fn series_inverse(cs in prop::collection::vec(-5i64..=5, 1..5), v in 0i64..3) {
        prop_assume!(cs[0] != 0);
        let s = QSeries::from_pairs(cs.iter().enumerate().map(|(k, &c)| (k as i64 + v, int(c))));
        let inv = s.inverse(6).unwrap();
        let one = &inv * &s;
        prop_assert_eq!(one.coeff(0).unwrap(), int(1));
        for k in 1..one.prec().unwrap() {
            prop_assert_eq!(one.coeff(k).unwrap(), int(0));
        }
    }

    #[test]
    fn rational_function_expansion_inverts_denominator(
        num in arb_poly(3),
        den in arb_poly(3),
    ) {
        prop_assume!(!den.is_zero() && !num.is_zero());
        let r = QRatFunc::new(num.clone(), den.clone()).unwrap();
        let lo = -(den.valuation().unwrap() as i64);
        let hi = lo + 8;
        let coeffs = r.laurent_expand(lo, hi).unwrap();
        // den(x) · Σ c_k x^k agrees with num(x) on the exponents determined by the window
        let mut prod = vec![Rational::from_integer(0.into()); 20];
        for (k, c) in coeffs.iter().enumerate() {
            for (d, dc) in den.coeffs().iter().enumerate() {
                let e = k as i64 + lo + d as i64;
                if (0..20).contains(&e) {
                    prod[e as usize] += c * dc;
                }
            }
        }
        let top = (hi + den.valuation().unwrap() as i64).min(19);
        for e in 0..=top {
            prop_assert_eq!(&prod[e as usize], &num.coeff(e as usize));
        }
    }
}
