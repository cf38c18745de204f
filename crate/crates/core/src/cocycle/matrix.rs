use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    enumerate_basis, level_columns, level_rows, max_level, BasisMonomial, Component,
    ParameterIndex,
};
use crate::normal_form::ParameterPoint;
use crate::scalar::display_rational;
use num_traits::Zero;

use crate::{QMatrix, Rational};

use super::expansion::{coefficients_batch, DEFAULT_MARGIN};
use super::local::CocycleContext;

/// Row and column ranges of the diagonal block of one level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelBlock {
    pub level: usize,
    pub rows: Range<usize>,
    pub cols: Range<usize>,
}

/// Exact cocycle matrix: rows are basis monomials, columns parameter directions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CocycleMatrix {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub rows: Vec<BasisMonomial>,
    pub cols: Vec<ParameterIndex>,
    #[serde(serialize_with = "ser_entries", deserialize_with = "de_entries")]
    pub entries: QMatrix,
    pub blocks: Vec<LevelBlock>,
}

fn ser_entries<S: serde::Serializer>(m: &QMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    crate::scalar::serde_rational::vec2::serialize(&m.to_rows(), s)
}

fn de_entries<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<QMatrix, D::Error> {
    let rows = crate::scalar::serde_rational::vec2::deserialize(d)?;
    if rows.is_empty() {
        return Ok(QMatrix::zeros(0, 0));
    }
    QMatrix::from_rows(rows).map_err(serde::de::Error::custom)
}

impl CocycleMatrix {
    pub fn size(&self) -> (usize, usize) {
        (self.entries.rows(), self.entries.cols())
    }

    pub fn det(&self) -> Result<Rational> {
        self.entries.det()
    }

    pub fn block(&self, level: usize) -> Option<QMatrix> {
        let b = self.blocks.iter().find(|b| b.level == level)?;
        Some(
            self.entries
                .block(b.rows.start, b.rows.end, b.cols.start, b.cols.end),
        )
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.rows.len()).collect()
    }

    /// Entries with a row of lower level than their column all vanish.
    pub fn is_block_lower_triangular(&self) -> bool {
        (0..self.rows.len()).all(|r| {
            (0..self.cols.len())
                .all(|c| self.rows[r].level >= self.cols[c].k || self.entries.get(r, c).is_zero())
        })
    }

    /// Sub-matrix on the given row and column labels.
    pub fn select(&self, rows: &[BasisMonomial], cols: &[ParameterIndex]) -> Option<QMatrix> {
        let ri: Option<Vec<usize>> = rows
            .iter()
            .map(|r| self.rows.iter().position(|x| x == r))
            .collect();
        let ci: Option<Vec<usize>> = cols
            .iter()
            .map(|c| self.cols.iter().position(|x| x == c))
            .collect();
        Some(self.entries.submatrix(&ri?, &ci?))
    }

    pub fn column_index(&self, c: &ParameterIndex) -> Option<usize> {
        self.cols.iter().position(|x| x == c)
    }
}

impl fmt::Display for CocycleMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> = self
            .entries
            .to_rows()
            .iter()
            .map(|r| r.iter().map(display_rational).collect())
            .collect();
        let mut width = self.cols.iter().map(|c| c.to_string().len()).max().unwrap_or(1);
        for r in &cells {
            for c in r {
                width = width.max(c.len());
            }
        }
        let labels: Vec<String> = self
            .rows
            .iter()
            .map(|r| format!("({},{})[{}]", r.i, r.j, r.component))
            .collect();
        let lw = labels.iter().map(String::len).max().unwrap_or(0);
        write!(f, "{:lw$}", "")?;
        for c in &self.cols {
            write!(f, " {:>width$}", c.to_string())?;
        }
        writeln!(f)?;
        for (label, row) in labels.iter().zip(&cells) {
            write!(f, "{label:lw$}")?;
            for c in row {
                write!(f, " {c:>width$}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Assembles the entries on arbitrary row and column labels. Each entry is the
/// coefficient of the level-1 cocycle on the row's side, at the row exponent
/// minus the column's propagation shift.
pub fn assemble(
    ctx: &CocycleContext,
    rows: &[BasisMonomial],
    cols: &[ParameterIndex],
    margin: usize,
) -> Result<QMatrix> {
    let mut windows: BTreeMap<(ParameterIndex, Component), Vec<(i64, i64)>> = BTreeMap::new();
    for c in cols {
        let (si, sj) = c.propagation_shift();
        for r in rows {
            windows
                .entry((c.level_one(), r.component))
                .or_default()
                .push((r.i - si, r.j - sj));
        }
    }
    let jobs: Vec<_> = windows
        .into_iter()
        .map(|(k, mut w)| {
            w.sort_unstable();
            w.dedup();
            (k, w)
        })
        .collect();
    let table = coefficients_batch(ctx, jobs, margin)?;
    let mut out = QMatrix::zeros(rows.len(), cols.len());
    for (ci, c) in cols.iter().enumerate() {
        let (si, sj) = c.propagation_shift();
        for (ri, r) in rows.iter().enumerate() {
            let v = table
                .get(&(c.level_one(), r.component))
                .and_then(|t| t.get(&(r.i - si, r.j - sj)))
                .ok_or_else(|| Error::InternalConsistency("missing cocycle coefficient".into()))?;
            out.set(ri, ci, v.clone());
        }
    }
    Ok(out)
}

fn build(
    ctx: &CocycleContext,
    levels: &[usize],
    margin: usize,
) -> Result<CocycleMatrix> {
    let p = ctx.point();
    let (m, n) = (p.m(), p.n());
    let mut rows = Vec::new();
    let mut cols = Vec::new();
    let mut blocks = Vec::new();
    for &k in levels {
        let r = level_rows(m, n, k)?;
        let c = level_columns(m, n, k)?;
        if r.len() != c.len() {
            return Err(Error::InternalConsistency(format!(
                "level {k} has {} rows and {} columns",
                r.len(),
                c.len()
            )));
        }
        if r.is_empty() {
            continue;
        }
        blocks.push(LevelBlock {
            level: k,
            rows: rows.len()..rows.len() + r.len(),
            cols: cols.len()..cols.len() + c.len(),
        });
        rows.extend(r);
        cols.extend(c);
    }
    let entries = assemble(ctx, &rows, &cols, margin)?;
    Ok(CocycleMatrix {
        m,
        n,
        rows,
        cols,
        entries,
        blocks,
    })
}

/// Diagonal block `A_k`.
pub fn build_level_matrix(p: &ParameterPoint, k: usize) -> Result<CocycleMatrix> {
    build_level_matrix_in(&CocycleContext::new(p)?, k, DEFAULT_MARGIN)
}

pub fn build_level_matrix_in(ctx: &CocycleContext, k: usize, margin: usize) -> Result<CocycleMatrix> {
    build(ctx, &[k], margin)
}

/// The full matrix over the cohomology basis, ordered by level.
pub fn full_matrix(p: &ParameterPoint) -> Result<CocycleMatrix> {
    full_matrix_with_margin(p, DEFAULT_MARGIN)
}

pub fn full_matrix_with_margin(p: &ParameterPoint, margin: usize) -> Result<CocycleMatrix> {
    full_matrix_in(&CocycleContext::new(p)?, margin)
}

pub fn full_matrix_in(ctx: &CocycleContext, margin: usize) -> Result<CocycleMatrix> {
    let p = ctx.point();
    let (m, n) = (p.m(), p.n());
    let levels: Vec<usize> = (1..=max_level(m, n)).collect();
    let mat = build(ctx, &levels, margin)?;
    if mat.rows.len() != enumerate_basis(m, n)?.len() {
        return Err(Error::InternalConsistency(
            "levels do not cover the cohomology basis".into(),
        ));
    }
    Ok(mat)
}

/// Level-`k` entries recomputed from the propagated fields themselves: each
/// chart's level-1 field is multiplied by the propagation monomial written in
/// that chart, transported and expanded again.
pub fn resolve_level_directly(ctx: &CocycleContext, k: usize, margin: usize) -> Result<QMatrix> {
    use super::expansion::{holo_other, holomorphic_var};
    use super::local::Site;
    use crate::blowup::MonomialMap;
    use crate::poly_core::expand_quotient;
    use crate::QLaurent;

    let p = ctx.point();
    let rows = level_rows(p.m(), p.n(), k)?;
    let cols = level_columns(p.m(), p.n(), k)?;
    let mut out = QMatrix::zeros(rows.len(), cols.len());
    for (ci, c) in cols.iter().enumerate() {
        let (si, sj) = c.propagation_shift();
        let mu4 = QLaurent::monomial(crate::blowup::Chart::V4.vars(), crate::scalar::int(1), si, sj);
        for side in [Component::C24, Component::C34] {
            let picked: Vec<(usize, &BasisMonomial)> = rows
                .iter()
                .enumerate()
                .filter(|(_, r)| r.component == side)
                .collect();
            if picked.is_empty() {
                continue;
            }
            let (far, near, map) = match side {
                Component::C34 => (Site::V3, Site::V4Side34, MonomialMap::v4_to_v3()),
                Component::C24 => (Site::V2, Site::V4Side24, MonomialMap::v4_to_v2()),
            };
            let mu_far = map.inverse()?.pull_function(&mu4)?;
            let x_far = ctx.local_solution(far, &c.level_one())?.field.mul_fn(&mu_far);
            let x_near = ctx.local_solution(near, &c.level_one())?.field.mul_fn(&mu4);
            let diff = &map.pull_field(&x_far)? - &x_near;
            let theta = ctx.theta0();
            let (num, den) = match side {
                Component::C34 => (diff.cx, theta.cx.clone()),
                Component::C24 => (diff.cy, theta.cy.clone()),
            };
            let (mut hmax, mut omax) = (i64::MIN, i64::MIN);
            for (_, r) in &picked {
                let (h, o) = holo_other(side, (r.i, r.j));
                hmax = hmax.max(h);
                omax = omax.max(o);
            }
            let s = expand_quotient(&num, &den, holomorphic_var(side), hmax, omax, margin)?;
            for (ri, r) in picked {
                out.set(ri, ci, s.coeff(r.i, r.j)?);
            }
        }
    }
    Ok(out)
}
