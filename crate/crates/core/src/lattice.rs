//! Cohomology basis monomials, parameter indices and the level structure of
//! the cocycle matrix.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which chart intersection a row's coefficient is read from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Component {
    /// Intersection of charts V2 and V4.
    #[serde(rename = "24")]
    C24,
    /// Intersection of charts V3 and V4.
    #[serde(rename = "34")]
    C34,
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::C24 => write!(f, "24"),
            Component::C34 => write!(f, "34"),
        }
    }
}

/// Monomial `x4^i y4^j` of the cohomology basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisMonomial {
    pub i: i64,
    pub j: i64,
    pub component: Component,
    pub level: usize,
}

impl BasisMonomial {
    pub fn exponents(&self) -> (i64, i64) {
        (self.i, self.j)
    }
}

impl fmt::Display for BasisMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "x4^{} y4^{} [{}] level {}",
            self.i, self.j, self.component, self.level
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "a")]
    A,
    #[serde(rename = "b")]
    B,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::A => write!(f, "a"),
            Family::B => write!(f, "b"),
        }
    }
}

/// Parameter `a_{k,i}` or `b_{k,i}` of the normal form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ParameterIndex {
    pub family: Family,
    pub k: usize,
    pub i: usize,
}

impl ParameterIndex {
    pub fn a(k: usize, i: usize) -> Self {
        ParameterIndex {
            family: Family::A,
            k,
            i,
        }
    }

    pub fn b(k: usize, i: usize) -> Self {
        ParameterIndex {
            family: Family::B,
            k,
            i,
        }
    }

    /// Whether the index exists for the given `(M, N)`.
    pub fn is_legal(&self, m: usize, n: usize) -> bool {
        match self.family {
            Family::A => self.i >= 1 && self.i < n && self.k >= 1 && self.k <= self.i,
            Family::B => {
                self.i >= 1 && self.i + 2 <= m && self.k >= 1 && self.k <= n - 1 + 2 * self.i
            }
        }
    }

    /// Exponents of the monomial relating this direction to its level-1 counterpart.
    pub fn propagation_shift(&self) -> (i64, i64) {
        let k = self.k as i64;
        match self.family {
            Family::A => (k - 1, 2 * k - 2),
            Family::B => (k - 1, k - 1),
        }
    }

    pub fn level_one(&self) -> Self {
        ParameterIndex { k: 1, ..*self }
    }
}

impl fmt::Display for ParameterIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{{{},{}}}", self.family, self.k, self.i)
    }
}

pub(crate) fn check_range(m: usize, n: usize) -> Result<()> {
    if m < 2 || n < 2 {
        return Err(Error::UnsupportedRange {
            m: m as i64,
            n: n as i64,
            min: 2,
        });
    }
    Ok(())
}

/// Number of basis monomials, `(M+N−2)(M+N−3)/2 + (M−1)(M−2)/2`.
pub fn dimension(m: usize, n: usize) -> Result<usize> {
    check_range(m, n)?;
    Ok((m + n - 2) * (m + n - 3) / 2 + (m - 1) * (m - 2) / 2)
}

/// Membership test for the basis region.
pub fn in_region(m: usize, n: usize, i: i64, j: i64) -> bool {
    let (m, n) = (m as i64, n as i64);
    (i >= 0 || j >= 0) && j - 2 * i + (n - 1) > 0 && j - i - (m - 1) < 0
}

/// Highest level, `N + 2M − 5`.
pub fn max_level(m: usize, n: usize) -> usize {
    n + 2 * m - 5
}

/// Number of rows at a level `k ≥ N`, with `]x]` read as `⌈x⌉ − 1`.
pub fn q_k(m: usize, n: usize, k: usize) -> usize {
    let (m, n, k) = (m as i64, n as i64, k as i64);
    let ceil_half = (k + n - 2 + 1).div_euclid(2);
    (ceil_half - 1 + m - k).max(0) as usize
}

/// All parameter indices, a-family first, each family ordered by `(k, i)`.
pub fn parameter_indices(m: usize, n: usize) -> Result<Vec<ParameterIndex>> {
    check_range(m, n)?;
    let mut out = Vec::new();
    for k in 1..n {
        for i in k..n {
            out.push(ParameterIndex::a(k, i));
        }
    }
    for k in 1..=max_level(m, n) {
        for i in 1..=m.saturating_sub(2) {
            let p = ParameterIndex::b(k, i);
            if p.is_legal(m, n) {
                out.push(p);
            }
        }
    }
    Ok(out)
}

/// Parameter directions of level `k` in column order: a-columns, then b-columns, increasing `i`.
pub fn level_columns(m: usize, n: usize, k: usize) -> Result<Vec<ParameterIndex>> {
    check_level(m, n, k)?;
    let mut out: Vec<ParameterIndex> = (k.max(1)..n).map(|i| ParameterIndex::a(k, i)).collect();
    out.extend(
        (1..=m.saturating_sub(2))
            .map(|i| ParameterIndex::b(k, i))
            .filter(|p| p.is_legal(m, n)),
    );
    Ok(out)
}

fn check_level(m: usize, n: usize, k: usize) -> Result<()> {
    check_range(m, n)?;
    let hi = max_level(m, n);
    if k < 1 || k > hi {
        return Err(Error::OutOfRange {
            what: "level",
            value: k as i64,
            lo: 1,
            hi: hi as i64,
        });
    }
    Ok(())
}

/// Row labels of the diagonal block at level `k`.
pub fn level_rows(m: usize, n: usize, k: usize) -> Result<Vec<BasisMonomial>> {
    check_level(m, n, k)?;
    let (mi, ni, ki) = (m as i64, n as i64, k as i64);
    let row = |i: i64, j: i64, component| BasisMonomial {
        i,
        j,
        component,
        level: k,
    };
    let mut out = Vec::new();
    if k == 1 {
        out.extend((-(ni - 2)..=0).map(|j| row(0, j, Component::C24)));
        out.extend((1..=mi - 2).map(|l| row(-l, 0, Component::C34)));
    } else if k < n {
        out.extend((2 * ki - ni..=ki - 1).map(|j| row(ki - 1, j, Component::C24)));
        out.extend(
            (-(mi - ki - 1)..=ki - 2)
                .rev()
                .map(|i| row(i, ki - 1, Component::C34)),
        );
    } else {
        let q = q_k(m, n, k) as i64;
        out.extend(
            (ki + 1 - mi..=ki + q - mi)
                .rev()
                .map(|i| row(i, ki - 1, Component::C34)),
        );
    }
    for b in &out {
        if !in_region(m, n, b.i, b.j) {
            return Err(Error::InternalConsistency(format!(
                "row ({}, {}) at level {k} lies outside the basis region",
                b.i, b.j
            )));
        }
    }
    Ok(out)
}

/// The full basis, ordered by level and then by row order within the level.
pub fn enumerate_basis(m: usize, n: usize) -> Result<Vec<BasisMonomial>> {
    check_range(m, n)?;
    let mut out = Vec::new();
    for k in 1..=max_level(m, n) {
        out.extend(level_rows(m, n, k)?);
    }
    Ok(out)
}

/// Brute-force scan of the basis region, independent of the level formulas.
pub fn scan_region(m: usize, n: usize) -> Vec<(i64, i64)> {
    let r = 2 * (m + n) as i64 + 4;
    let mut out = Vec::new();
    for i in -r..=r {
        for j in -r..=r {
            if in_region(m, n, i, j) {
                out.push((i, j));
            }
        }
    }
    out
}
