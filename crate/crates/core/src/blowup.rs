//! Charts of the two-step blow-up, exact pullback of functions and vector
//! fields, strict-transform factorizations and the generator `Θ₀`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal_form::{
    build_normal_form, cleared_product, normal_form_factors, ParameterPoint, PlanePoly,
};
use crate::poly_core::{Monomial, Var, Vars};
use crate::scalar::int;
use crate::{QLaurent, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Chart {
    V1,
    V2,
    V3,
    V4,
}

impl Chart {
    pub const ALL: [Chart; 4] = [Chart::V1, Chart::V2, Chart::V3, Chart::V4];

    pub fn vars(self) -> Vars {
        match self {
            Chart::V1 => Vars("x1", "y1"),
            Chart::V2 => Vars("x2", "y2"),
            Chart::V3 => Vars("x3", "y3"),
            Chart::V4 => Vars("x4", "y4"),
        }
    }

    /// The blow-up map from this chart to the plane.
    pub fn map(self) -> MonomialMap {
        let m = |i, j| Monomial::unit(i, j);
        let (ix, iy) = match self {
            Chart::V1 => (m(1, 0), m(1, 1)),
            Chart::V2 => (m(1, 1), m(0, 1)),
            Chart::V3 => (m(1, 0), m(2, 1)),
            Chart::V4 => (m(1, 1), m(1, 2)),
        };
        MonomialMap::new(self.vars(), Vars::XY, ix, iy)
    }

    /// Which chart variables cut out the exceptional divisor.
    pub fn exceptional(self) -> (bool, bool) {
        match self {
            Chart::V1 | Chart::V3 => (true, false),
            Chart::V2 => (false, true),
            Chart::V4 => (true, true),
        }
    }

    pub fn parse(s: &str) -> Result<Chart> {
        match s.to_ascii_lowercase().as_str() {
            "v1" => Ok(Chart::V1),
            "v2" => Ok(Chart::V2),
            "v3" => Ok(Chart::V3),
            "v4" => Ok(Chart::V4),
            _ => Err(Error::InvalidInput(format!("unknown chart {s:?}"))),
        }
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Chart::V1 => "V1",
            Chart::V2 => "V2",
            Chart::V3 => "V3",
            Chart::V4 => "V4",
        };
        write!(f, "{s}")
    }
}

/// A map `(u, v) ↦ (c₁u^{p₁}v^{q₁}, c₂u^{p₂}v^{q₂})` from `source` coordinates to
/// `target` coordinates; the images express the target variables in the source ones.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialMap {
    pub source: Vars,
    pub target: Vars,
    pub image_first: Monomial<Rational>,
    pub image_second: Monomial<Rational>,
}

impl MonomialMap {
    pub fn new(
        source: Vars,
        target: Vars,
        image_first: Monomial<Rational>,
        image_second: Monomial<Rational>,
    ) -> Self {
        MonomialMap {
            source,
            target,
            image_first,
            image_second,
        }
    }

    /// `x₃ = x₄y₄`, `y₃ = 1/x₄`.
    pub fn v4_to_v3() -> Self {
        Self::new(
            Chart::V4.vars(),
            Chart::V3.vars(),
            Monomial::unit(1, 1),
            Monomial::unit(-1, 0),
        )
    }

    /// `x₂ = 1/y₄`, `y₂ = x₄y₄²`.
    pub fn v4_to_v2() -> Self {
        Self::new(
            Chart::V4.vars(),
            Chart::V2.vars(),
            Monomial::unit(0, -1),
            Monomial::unit(1, 2),
        )
    }

    fn det(&self) -> i64 {
        let (p1, q1) = self.image_first.exp;
        let (p2, q2) = self.image_second.exp;
        p1 * q2 - q1 * p2
    }

    /// Inverse map; needs a unimodular exponent matrix.
    pub fn inverse(&self) -> Result<Self> {
        let d = self.det();
        if d.abs() != 1 {
            return Err(Error::InvalidInput(
                "monomial map is not invertible over Laurent monomials".into(),
            ));
        }
        let (p1, q1) = self.image_first.exp;
        let (p2, q2) = self.image_second.exp;
        // u = x^{q2/d} y^{-q1/d}, v = x^{-p2/d} y^{p1/d}, coefficients divided out.
        let (ux, uy) = (q2 * d, -q1 * d);
        let (vx, vy) = (-p2 * d, p1 * d);
        let c1 = &self.image_first.coeff;
        let c2 = &self.image_second.coeff;
        let coeff = |a: i64, b: i64| {
            use crate::Scalar;
            c1.pow_i(-a) * c2.pow_i(-b)
        };
        Ok(Self::new(
            self.target,
            self.source,
            Monomial::new(coeff(ux, uy), ux, uy),
            Monomial::new(coeff(vx, vy), vx, vy),
        ))
    }

    /// Composition `self ∘ inner`: first `inner`, then `self`.
    pub fn after(&self, inner: &MonomialMap) -> Result<Self> {
        if inner.target != self.source {
            return Err(Error::InvalidInput("maps do not compose".into()));
        }
        let img = |m: &Monomial<Rational>| {
            let a = inner.image_first.pow(m.exp.0);
            let b = inner.image_second.pow(m.exp.1);
            let r = a.mul(&b);
            Monomial::new(r.coeff * m.coeff.clone(), r.exp.0, r.exp.1)
        };
        Ok(Self::new(
            inner.source,
            self.target,
            img(&self.image_first),
            img(&self.image_second),
        ))
    }

    /// `g ∘ self` for a function `g` of the target variables.
    pub fn pull_function(&self, g: &QLaurent) -> Result<QLaurent> {
        g.substitute_monomial(&self.image_first, &self.image_second, self.source)
    }

    /// The unique field on the source whose push-forward is `v`.
    pub fn pull_field(&self, v: &VectorFieldExpr) -> Result<VectorFieldExpr> {
        let a = self.pull_function(&v.cx)?;
        let b = self.pull_function(&v.cy)?;
        let d = self.det();
        if d == 0 {
            return Err(Error::InternalConsistency(
                "degenerate monomial map".into(),
            ));
        }
        let (p1, q1) = self.image_first.exp;
        let (p2, q2) = self.image_second.exp;
        let inv_first = self.image_first.pow(-1);
        let inv_second = self.image_second.pow(-1);
        let a_over_x = a.mul_monomial(&inv_first);
        let b_over_y = b.mul_monomial(&inv_second);
        let dinv = Rational::new(1.into(), d.into());
        let s = &a_over_x.scale(&int(q2)) - &b_over_y.scale(&int(q1));
        let t = &b_over_y.scale(&int(p1)) - &a_over_x.scale(&int(p2));
        Ok(VectorFieldExpr {
            cx: s.shift(1, 0).scale(&dinv),
            cy: t.shift(0, 1).scale(&dinv),
        })
    }
}

/// `cx ∂/∂u + cy ∂/∂v` in the variables carried by the components.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorFieldExpr {
    pub cx: QLaurent,
    pub cy: QLaurent,
}

impl VectorFieldExpr {
    pub fn new(cx: QLaurent, cy: QLaurent) -> Result<Self> {
        if cx.vars() != cy.vars() {
            return Err(Error::InvalidInput(
                "vector field components live in different charts".into(),
            ));
        }
        Ok(VectorFieldExpr { cx, cy })
    }

    pub fn zero(vars: Vars) -> Self {
        VectorFieldExpr {
            cx: QLaurent::zero(vars),
            cy: QLaurent::zero(vars),
        }
    }

    pub fn vars(&self) -> Vars {
        self.cx.vars()
    }

    pub fn is_zero(&self) -> bool {
        self.cx.is_zero() && self.cy.is_zero()
    }

    /// Derivation applied to a function.
    pub fn apply(&self, f: &QLaurent) -> QLaurent {
        &(&self.cx * &f.derivative(Var::First)) + &(&self.cy * &f.derivative(Var::Second))
    }

    pub fn scale(&self, s: &Rational) -> Self {
        VectorFieldExpr {
            cx: self.cx.scale(s),
            cy: self.cy.scale(s),
        }
    }

    pub fn shift(&self, i: i64, j: i64) -> Self {
        VectorFieldExpr {
            cx: self.cx.shift(i, j),
            cy: self.cy.shift(i, j),
        }
    }

    pub fn mul_fn(&self, f: &QLaurent) -> Self {
        VectorFieldExpr {
            cx: &self.cx * f,
            cy: &self.cy * f,
        }
    }

    /// Divides both components by `u^i v^j`, failing if a pole appears.
    pub fn div_monomial_holomorphic(&self, i: i64, j: i64) -> Result<Self> {
        let wrap = |e: Error| Error::InternalConsistency(e.to_string());
        Ok(VectorFieldExpr {
            cx: self.cx.div_monomial_holomorphic(i, j).map_err(wrap)?,
            cy: self.cy.div_monomial_holomorphic(i, j).map_err(wrap)?,
        })
    }
}

impl std::ops::Sub for &VectorFieldExpr {
    type Output = VectorFieldExpr;
    fn sub(self, rhs: &VectorFieldExpr) -> VectorFieldExpr {
        VectorFieldExpr {
            cx: &self.cx - &rhs.cx,
            cy: &self.cy - &rhs.cy,
        }
    }
}

impl std::ops::Add for &VectorFieldExpr {
    type Output = VectorFieldExpr;
    fn add(self, rhs: &VectorFieldExpr) -> VectorFieldExpr {
        VectorFieldExpr {
            cx: &self.cx + &rhs.cx,
            cy: &self.cy + &rhs.cy,
        }
    }
}

impl fmt::Display for VectorFieldExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Vars(u, v) = self.vars();
        write!(f, "({}) d/d{u} + ({}) d/d{v}", self.cx, self.cy)
    }
}

/// `Θ_f = f_x ∂/∂y − f_y ∂/∂x`, in whatever variables `f` carries.
pub fn hamiltonian_field(f: &QLaurent) -> VectorFieldExpr {
    VectorFieldExpr {
        cx: -&f.derivative(Var::Second),
        cy: f.derivative(Var::First),
    }
}

pub fn pullback_function(f: &PlanePoly, chart: Chart) -> Result<QLaurent> {
    chart.map().pull_function(f.as_laurent())
}

pub fn pullback_vector_field(v: &VectorFieldExpr, chart: Chart) -> Result<VectorFieldExpr> {
    if v.vars() != Vars::XY {
        return Err(Error::InvalidInput(
            "only fields in the plane coordinates can be pulled back to a chart".into(),
        ));
    }
    chart.map().pull_field(v)
}

/// Pullback of the normal form, built factor by factor.
pub fn pulled_normal_form(p: &ParameterPoint, chart: Chart) -> Result<QLaurent> {
    let map = chart.map();
    let pulled = normal_form_factors(p)
        .iter()
        .map(|f| map.pull_function(f))
        .collect::<Result<Vec<_>>>()?;
    Ok(cleared_product(&pulled, chart.vars()))
}

/// `Ñ = u^{exc_x} v^{exc_y} · rest` with only exceptional variables extracted.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    pub chart: Chart,
    pub exc_x: i64,
    pub exc_y: i64,
    pub rest: QLaurent,
}

pub fn strict_transform_factorization(p: &ParameterPoint, chart: Chart) -> Result<Factorization> {
    let f = pulled_normal_form(p, chart)?;
    let (ex, ey) = chart.exceptional();
    let exc_x = if ex { f.min_exp(Var::First).unwrap_or(0) } else { 0 };
    let exc_y = if ey { f.min_exp(Var::Second).unwrap_or(0) } else { 0 };
    let rest = f.div_monomial_holomorphic(exc_x, exc_y)?;
    Ok(Factorization {
        chart,
        exc_x,
        exc_y,
        rest,
    })
}

/// Exponents `(M+N−2, 2M+N−3)` removed from the pulled-back field to get `Θ₀`.
pub fn theta_zero_exponents(m: usize, n: usize) -> (i64, i64) {
    let (m, n) = (m as i64, n as i64);
    (m + n - 2, 2 * m + n - 3)
}

/// `E*Θ_N / (x₄^{M+N−2} y₄^{2M+N−3})` in chart V4.
pub fn theta_zero(p: &ParameterPoint) -> Result<VectorFieldExpr> {
    let (ex, ey) = theta_zero_exponents(p.m(), p.n());
    theta_zero_with(p, ex, ey)
}

/// The same construction with arbitrary exponents; errors when the quotient has a pole.
pub fn theta_zero_with(p: &ParameterPoint, ex: i64, ey: i64) -> Result<VectorFieldExpr> {
    let theta = hamiltonian_field(build_normal_form(p).as_laurent());
    let pulled = pullback_vector_field(&theta, Chart::V4)?;
    pulled.div_monomial_holomorphic(ex, ey)
}

/// Checks that the chart transitions carry the V4 pullback onto the V3 and V2 pullbacks.
pub fn transition_consistency(p: &ParameterPoint) -> Result<bool> {
    let n4 = pulled_normal_form(p, Chart::V4)?;
    let v3_to_v4 = MonomialMap::v4_to_v3().inverse()?;
    let v2_to_v4 = MonomialMap::v4_to_v2().inverse()?;
    let via3 = v3_to_v4.pull_function(&n4)?;
    let via2 = v2_to_v4.pull_function(&n4)?;
    Ok(via3 == pulled_normal_form(p, Chart::V3)? && via2 == pulled_normal_form(p, Chart::V2)?)
}

/// Restriction of `rest` to the exceptional divisor of a one-divisor chart.
pub fn divisor_restriction(fact: &Factorization) -> Result<crate::QPoly> {
    match fact.chart {
        Chart::V3 | Chart::V1 => fact.rest.restrict_zero(Var::First),
        Chart::V2 => fact.rest.restrict_zero(Var::Second),
        Chart::V4 => Err(Error::InvalidInput(
            "chart V4 meets two divisor components; restrict explicitly".into(),
        )),
    }
}

/// Ñ(x₁, y₁) = x₁y₁(y₁+x₁)∏(y₁ + Σ a x₁^{k−1}y₁^{k−1})∏(y₁ + Σ b x₁^k), the strict
/// transform after the first blow-up.
pub fn first_blowup_strict_transform(p: &ParameterPoint) -> QLaurent {
    let vars = Chart::V1.vars();
    let t = |c: Rational, i: i64, j: i64| QLaurent::monomial(vars, c, i, j);
    let y = t(int(1), 0, 1);
    let mut acc = &t(int(1), 1, 1) * &(&y + &t(int(1), 1, 0));
    for i in 1..p.n() {
        let mut f = y.clone();
        for k in 1..=i {
            let e = k as i64 - 1;
            f.add_term((e, e), p.a(k, i).clone());
        }
        acc = &acc * &f;
    }
    for i in 1..=p.m().saturating_sub(2) {
        let mut f = y.clone();
        for k in 1..=(p.n() - 1 + 2 * i) {
            f.add_term((k as i64, 0), p.b(k, i).clone());
        }
        acc = &acc * &f;
    }
    acc
}

/// True if the polynomial vanishes identically after restricting the chosen variable to zero.
pub fn vanishes_on(f: &QLaurent, v: Var) -> bool {
    f.slice(v, 0).is_zero() && f.min_exp(v).is_none_or(|e| e >= 0)
}
