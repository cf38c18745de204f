use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;

use crate::blowup::MonomialMap;
use crate::error::{Error, Result};
use crate::lattice::{Component, ParameterIndex};
use crate::normal_form::ParameterPoint;
use crate::poly_core::{expand_quotient, BiSeries, Var};
use crate::{QLaurent, Rational};

use super::local::{CocycleContext, Site};

/// Default number of extra internal expansion terms.
pub const DEFAULT_MARGIN: usize = 2;

/// Variable in which the cocycle on a side is a power series.
pub fn holomorphic_var(side: Component) -> Var {
    match side {
        Component::C34 => Var::Second,
        Component::C24 => Var::First,
    }
}

/// Numerator and denominator of the cocycle of a level-1 direction on a side:
/// the relevant component of the transported difference field and of `Θ₀`.
pub fn cocycle_quotient(
    ctx: &CocycleContext,
    dir: &ParameterIndex,
    side: Component,
) -> Result<(QLaurent, QLaurent)> {
    let (far, near, map) = match side {
        Component::C34 => (Site::V3, Site::V4Side34, MonomialMap::v4_to_v3()),
        Component::C24 => (Site::V2, Site::V4Side24, MonomialMap::v4_to_v2()),
    };
    let x_far = map.pull_field(&ctx.local_solution(far, dir)?.field)?;
    let x_near = ctx.local_solution(near, dir)?.field;
    let diff = &x_far - &x_near;
    let theta = ctx.theta0();
    let (num, den) = match side {
        Component::C34 => (diff.cx, theta.cx.clone()),
        Component::C24 => (diff.cy, theta.cy.clone()),
    };
    if den.restrict_zero(holomorphic_var(side))?.is_zero() {
        return Err(Error::InternalConsistency(format!(
            "Θ₀ vanishes identically on the divisor of the {side}-side"
        )));
    }
    Ok((num, den))
}

/// The cocycle expanded up to `holo^holo_max`, coefficients known through `other^other_max`.
pub fn cocycle_series(
    ctx: &CocycleContext,
    dir: &ParameterIndex,
    side: Component,
    holo_max: i64,
    other_max: i64,
    margin: usize,
) -> Result<BiSeries<Rational>> {
    let (num, den) = cocycle_quotient(ctx, dir, side)?;
    expand_quotient(&num, &den, holomorphic_var(side), holo_max, other_max, margin)
}

/// Split of an exponent pair into (holomorphic, other) exponents.
pub fn holo_other(side: Component, (i, j): (i64, i64)) -> (i64, i64) {
    match holomorphic_var(side) {
        Var::First => (i, j),
        Var::Second => (j, i),
    }
}

/// Laurent coefficients of the cocycle of a level-1 direction at the given exponents.
pub fn cocycle_coefficients(
    p: &ParameterPoint,
    dir: &ParameterIndex,
    window: &[(i64, i64)],
    side: Component,
    margin: usize,
) -> Result<BTreeMap<(i64, i64), Rational>> {
    let ctx = CocycleContext::new(p)?;
    coefficients_in(&ctx, dir, window, side, margin)
}

pub(crate) fn coefficients_in(
    ctx: &CocycleContext,
    dir: &ParameterIndex,
    window: &[(i64, i64)],
    side: Component,
    margin: usize,
) -> Result<BTreeMap<(i64, i64), Rational>> {
    let mut out = coefficients_batch(ctx, vec![((*dir, side), window.to_vec())], margin)?;
    Ok(out.remove(&(*dir, side)).unwrap_or_default())
}

type Key = (ParameterIndex, Component);
type Coefficients = BTreeMap<(i64, i64), Rational>;
type Job = (Key, Vec<(i64, i64)>);
type Numerator = (Key, Vec<(i64, i64)>, QLaurent);

fn extent(side: Component, window: &[(i64, i64)]) -> (i64, i64) {
    window.iter().fold((i64::MIN, i64::MIN), |(h, o), &e| {
        let (eh, eo) = holo_other(side, e);
        (h.max(eh), o.max(eo))
    })
}

/// Coefficients for many (direction, side) windows. `1/Θ₀` is expanded once per
/// side on a window large enough for every numerator, then multiplied out.
pub(crate) fn coefficients_batch(
    ctx: &CocycleContext,
    jobs: Vec<Job>,
    margin: usize,
) -> Result<BTreeMap<Key, Coefficients>> {
    let jobs: Vec<Job> =
        jobs.into_iter().filter(|(_, w)| !w.is_empty()).collect();
    let nums: Vec<Numerator> = jobs
        .into_par_iter()
        .map(|((dir, side), w)| {
            let (num, _) = cocycle_quotient(ctx, &dir, side)?;
            Ok(((dir, side), w, num))
        })
        .collect::<Result<_>>()?;

    let mut need: BTreeMap<Component, (i64, i64)> = BTreeMap::new();
    for ((_, side), w, num) in &nums {
        if num.is_zero() {
            continue;
        }
        let hv = holomorphic_var(*side);
        let (h, o) = extent(*side, w);
        let h = h - num.min_exp(hv).unwrap_or(0);
        let o = o - num.min_exp(hv.other()).unwrap_or(0);
        let e = need.entry(*side).or_insert((h, o));
        *e = (e.0.max(h), e.1.max(o));
    }
    let inverses: BTreeMap<Component, BiSeries<Rational>> = need
        .into_par_iter()
        .map(|(side, (h, o))| {
            let den = match side {
                Component::C34 => &ctx.theta0().cx,
                Component::C24 => &ctx.theta0().cy,
            };
            let one = QLaurent::one(den.vars());
            expand_quotient(&one, den, holomorphic_var(side), h, o, margin).map(|s| (side, s))
        })
        .collect::<Result<_>>()?;

    nums.into_par_iter()
        .map(|(key, w, num)| {
            let mut coeffs = BTreeMap::new();
            if num.is_zero() {
                for e in w {
                    coeffs.insert(e, Rational::zero());
                }
                return Ok((key, coeffs));
            }
            let (h, o) = extent(key.1, &w);
            let s = inverses[&key.1].mul_laurent(&num, h, o)?;
            for e in w {
                coeffs.insert(e, s.coeff(e.0, e.1)?);
            }
            Ok((key, coeffs))
        })
        .collect()
}
