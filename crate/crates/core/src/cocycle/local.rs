use std::collections::BTreeMap;
use std::fmt;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::blowup::{pulled_normal_form, theta_zero, Chart, VectorFieldExpr};
use crate::error::{Error, Result};
use crate::lattice::ParameterIndex;
use crate::normal_form::{normal_form_factors, parameter_factor, product_except, ParameterPoint};
use crate::poly_core::Var;
use crate::scalar::{int, rat};
use crate::{QLaurent, QPoly};

use super::bezout::{bezout_cofactors, BezoutData};

/// A chart together with the divisor component along which the deformation
/// equation is solved to leading order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Site {
    /// Chart V4 near `y₄ = 0`, facing V3.
    V4Side34,
    /// Chart V3 near `x₃ = 0`.
    V3,
    /// Chart V4 near `x₄ = 0`, facing V2.
    V4Side24,
    /// Chart V2 near `y₂ = 0`.
    V2,
}

impl Site {
    pub const ALL: [Site; 4] = [Site::V4Side34, Site::V3, Site::V4Side24, Site::V2];

    pub fn chart(self) -> Chart {
        match self {
            Site::V4Side34 | Site::V4Side24 => Chart::V4,
            Site::V3 => Chart::V3,
            Site::V2 => Chart::V2,
        }
    }

    /// Short identifier used in check names.
    pub fn tag(self) -> &'static str {
        match self {
            Site::V4Side34 => "v4y",
            Site::V3 => "v3",
            Site::V4Side24 => "v4x",
            Site::V2 => "v2",
        }
    }

    /// The chart variable defining the divisor component.
    pub fn divisor(self) -> Var {
        match self {
            Site::V4Side34 | Site::V2 => Var::Second,
            Site::V3 | Site::V4Side24 => Var::First,
        }
    }

    /// Multiplicity of the normal form along the divisor component.
    pub fn exponent(self, m: usize, n: usize) -> i64 {
        let (m, n) = (m as i64, n as i64);
        match self {
            Site::V4Side34 | Site::V3 => 2 * m + n,
            Site::V4Side24 | Site::V2 => m + n,
        }
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Site::V4Side34 => "V4 (y4 = 0)",
            Site::V3 => "V3 (x3 = 0)",
            Site::V4Side24 => "V4 (x4 = 0)",
            Site::V2 => "V2 (y2 = 0)",
        };
        write!(f, "{s}")
    }
}

/// Leading-order solution of `∂Ñ/∂p = X(Ñ)` near one divisor component.
///
/// With `Q` the restriction of `Ñ / (divisor)^e` and `∂Q = G·H`, the field is
/// `W·H` along the divisor and `(divisor)·Z·H/e` across it.
#[derive(Clone, Debug)]
pub struct LocalSolution {
    pub site: Site,
    pub dir: ParameterIndex,
    pub restricted: QPoly,
    pub restricted_derivative: QPoly,
    pub bezout: BezoutData,
    pub along: QPoly,
    pub across: QPoly,
    pub field: VectorFieldExpr,
}

impl LocalSolution {
    /// `∂Q = along·Q′ + e·across·Q` as an exact polynomial identity.
    pub fn restricted_identity_holds(&self, m: usize, n: usize) -> bool {
        let e = int(self.site.exponent(m, n));
        let rhs = &(&self.along * &self.restricted.derivative())
            + &(&self.across * &self.restricted).scale(&e);
        rhs == self.restricted_derivative
    }
}

/// Per-point cache of pullbacks, parameter derivatives and local solutions.
pub struct CocycleContext {
    p: ParameterPoint,
    pulled: BTreeMap<Chart, QLaurent>,
    theta0: VectorFieldExpr,
    derivs: Mutex<BTreeMap<(Chart, usize), QLaurent>>,
    bezout: Mutex<BTreeMap<Site, BezoutData>>,
}

impl CocycleContext {
    pub fn new(p: &ParameterPoint) -> Result<Self> {
        let mut pulled = BTreeMap::new();
        for c in [Chart::V2, Chart::V3, Chart::V4] {
            pulled.insert(c, pulled_normal_form(p, c)?);
        }
        Ok(CocycleContext {
            p: p.clone(),
            pulled,
            theta0: theta_zero(p)?,
            derivs: Mutex::new(BTreeMap::new()),
            bezout: Mutex::new(BTreeMap::new()),
        })
    }

    pub fn point(&self) -> &ParameterPoint {
        &self.p
    }

    pub fn theta0(&self) -> &VectorFieldExpr {
        &self.theta0
    }

    pub fn pulled(&self, c: Chart) -> Result<QLaurent> {
        match self.pulled.get(&c) {
            Some(f) => Ok(f.clone()),
            None => pulled_normal_form(&self.p, c),
        }
    }

    /// `∂Ñ/∂p` in a chart: the pullback of the other factors times the pulled
    /// monomial that the parameter multiplies.
    pub fn derivative(&self, c: Chart, dir: &ParameterIndex) -> Result<QLaurent> {
        let (f, (i, j)) = parameter_factor(&self.p, dir)?;
        let rest = self.product_except(c, f)?;
        let map = c.map();
        let mono = map
            .image_first
            .pow(i)
            .mul(&map.image_second.pow(j));
        Ok(rest.mul_monomial(&mono))
    }

    fn product_except(&self, c: Chart, f: usize) -> Result<QLaurent> {
        if let Some(d) = self.derivs.lock().expect("cache lock").get(&(c, f)) {
            return Ok(d.clone());
        }
        let map = c.map();
        let factors = normal_form_factors(&self.p)
            .iter()
            .map(|g| map.pull_function(g))
            .collect::<Result<Vec<_>>>()?;
        let d = product_except(&factors, f, c.vars());
        self.derivs
            .lock()
            .expect("cache lock")
            .insert((c, f), d.clone());
        Ok(d)
    }

    /// Restriction of `Ñ / (divisor)^e` to the divisor, as a polynomial in the other variable.
    pub fn restricted(&self, site: Site) -> Result<QPoly> {
        let e = site.exponent(self.p.m(), self.p.n());
        self.pulled(site.chart())?
            .slice(site.divisor(), e)
            .to_unipoly()
    }

    pub fn bezout(&self, site: Site) -> Result<BezoutData> {
        if let Some(b) = self.bezout.lock().expect("cache lock").get(&site) {
            return Ok(b.clone());
        }
        let b = bezout_cofactors(&self.restricted(site)?)?;
        self.bezout
            .lock()
            .expect("cache lock")
            .insert(site, b.clone());
        Ok(b)
    }

    /// Leading-order solution for a level-1 direction at a site.
    pub fn local_solution(&self, site: Site, dir: &ParameterIndex) -> Result<LocalSolution> {
        if dir.k != 1 {
            return Err(Error::InvalidInput(format!(
                "local solutions are built for level-1 directions, got {dir}"
            )));
        }
        let (m, n) = (self.p.m(), self.p.n());
        let e = site.exponent(m, n);
        let chart = site.chart();
        let divisor = site.divisor();
        let q = self.restricted(site)?;
        let dq = self.derivative(chart, dir)?.slice(divisor, e).to_unipoly()?;
        let bz = self.bezout(site)?;
        let h = dq.div_exact(&bz.g).map_err(|_| {
            Error::InternalConsistency(format!(
                "∂Q/∂{dir} is not divisible by gcd(Q, Q′) at {site}"
            ))
        })?;
        let along = &bz.w * &h;
        let across = (&bz.z * &h).scale(&rat(1, e));
        let vars = chart.vars();
        let other = divisor.other();
        let along_l = QLaurent::from_unipoly(vars, other, &along);
        let across_l = QLaurent::from_unipoly(vars, other, &across);
        let field = match divisor {
            Var::Second => VectorFieldExpr::new(along_l, across_l.shift(0, 1))?,
            Var::First => VectorFieldExpr::new(across_l.shift(1, 0), along_l)?,
        };
        Ok(LocalSolution {
            site,
            dir: *dir,
            restricted: q,
            restricted_derivative: dq,
            bezout: bz,
            along,
            across,
            field,
        })
    }

    /// Order along the divisor of `∂Ñ/∂p − X(Ñ)` if it is at most `bound`, `None` otherwise.
    pub fn residual_order(&self, sol: &LocalSolution, bound: i64) -> Result<Option<i64>> {
        let chart = sol.site.chart();
        let v = sol.site.divisor();
        // Field components have no poles along the divisor, so higher terms of Ñ cannot contribute.
        let f = self.pulled(chart)?.truncate_exp(v, bound);
        let lhs = self.derivative(chart, &sol.dir)?.truncate_exp(v, bound);
        let r = &lhs - &sol.field.apply(&f).truncate_exp(v, bound);
        Ok(r.min_exp(v))
    }

    /// Directions of level 1 in column order.
    pub fn level_one_directions(&self) -> Vec<ParameterIndex> {
        let (m, n) = (self.p.m(), self.p.n());
        let mut out: Vec<ParameterIndex> = (1..n).map(|i| ParameterIndex::a(1, i)).collect();
        out.extend((1..=m.saturating_sub(2)).map(|i| ParameterIndex::b(1, i)));
        out
    }
}

/// Checks `∂Ñ/∂p_{k,i} = x₄^{k−1}y₄^{s}·∂Ñ/∂p_{1,i}` on the V4 pullback, with
/// `s = 2k−2` for the a-family and `k−1` for the b-family. The left side is a
/// unit difference of the full pullback, the right side the factor-wise derivative.
pub fn verify_propagation(ctx: &CocycleContext, dir: &ParameterIndex) -> Result<bool> {
    let p = ctx.point();
    let v = p
        .get(dir)
        .ok_or_else(|| Error::InvalidInput(format!("{dir} is not a parameter")))?;
    let shifted = p.with_value(dir, v + int(1))?;
    let dk = &pulled_normal_form(&shifted, Chart::V4)? - &ctx.pulled(Chart::V4)?;
    let (i, j) = dir.propagation_shift();
    let d1 = ctx.derivative(Chart::V4, &dir.level_one())?;
    Ok(dk == d1.shift(i, j))
}
