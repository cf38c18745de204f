//! The verification suite run by `nqh verify`: every identity the crate can
//! check, evaluated at seeded generic points and collected into one report.

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blowup::{
    divisor_restriction, strict_transform_factorization, theta_zero, theta_zero_exponents,
    theta_zero_with, transition_consistency, Chart,
};
use crate::cocycle::{
    build_level_matrix_in, closed_form_oracles_on, full_matrix_in, resolve_level_directly,
    verify_propagation, Check, CocycleContext, Fault, Site, Status, DEFAULT_MARGIN,
};
use crate::error::Result;
use crate::lattice::{
    enumerate_basis, level_columns, level_rows, max_level, parameter_indices,
};
use crate::normal_form::{
    component_derivative_structure, sample_generic_parameters, verify_scaling_identity,
    ParameterPoint,
};
use crate::poly_core::Var;
use crate::scalar::{display_rational, int, rat};
use crate::{QLaurent, QPoly, Rational};

/// Outcome of a verification run. Checks are sorted by name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub seed: u64,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub trials: usize,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new(seed: u64, m: usize, n: usize, trials: usize, mut checks: Vec<Check>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let passed = checks.iter().all(|c| c.status != Status::Fail);
        VerificationReport {
            seed,
            m,
            n,
            trials,
            passed,
            checks,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }
}

/// Seed of trial `t` for a run seeded with `seed`.
pub fn trial_seed(seed: u64, t: usize) -> u64 {
    seed.wrapping_add(t as u64)
}

/// Runs the suite on `trials` points sampled from consecutive seeds.
pub fn run_verify(
    m: usize,
    n: usize,
    seed: u64,
    trials: usize,
    fault: Option<Fault>,
) -> Result<VerificationReport> {
    let per_trial: Vec<Vec<Check>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let p = sample_generic_parameters(m, n, trial_seed(seed, t))?;
            let checks = verify_point(&p, fault)?;
            Ok(checks
                .into_iter()
                .map(|mut c| {
                    c.name = format!("trial{t:02}.{}", c.name);
                    c
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(VerificationReport::new(
        seed,
        m,
        n,
        trials,
        per_trial.into_iter().flatten().collect(),
    ))
}

fn product(factors: impl IntoIterator<Item = QPoly>) -> QPoly {
    factors.into_iter().fold(QPoly::one(), |acc, f| &acc * &f)
}

fn lin(c0: &Rational, c1: &Rational) -> QPoly {
    QPoly::from_coeffs(vec![c0.clone(), c1.clone()])
}

/// Divisor restrictions written out from the first-level parameters.
pub struct ExpectedRestrictions {
    /// `y(y+1)∏a∏(y+b)` on `x₃ = 0`.
    pub p_v3: QPoly,
    /// `x∏(1+ax)` on `y₂ = 0`.
    pub j_v2: QPoly,
    /// `x^{M+N}(1+x)∏a∏(1+bx)`, coefficient of `y₄^{2M+N}`.
    pub q_v4: QPoly,
    /// `y^{2M+N}∏(y+a)`, coefficient of `x₄^{M+N}`.
    pub a_v4: QPoly,
}

impl ExpectedRestrictions {
    pub fn new(p: &ParameterPoint) -> Self {
        let (m, n) = (p.m(), p.n());
        let one = int(1);
        let zero = Rational::zero();
        let pa = p.prod_a1();
        let a = p.a1();
        let b = p.b1();
        let p_v3 = product(
            [lin(&zero, &one), lin(&one, &one), QPoly::constant(pa.clone())]
                .into_iter()
                .chain(b.iter().map(|bi| lin(bi, &one))),
        );
        let j_v2 = product(
            std::iter::once(lin(&zero, &one)).chain(a.iter().map(|ai| lin(&one, ai))),
        );
        let q_v4 = product(
            [
                QPoly::monomial(one.clone(), m + n),
                lin(&one, &one),
                QPoly::constant(pa),
            ]
            .into_iter()
            .chain(b.iter().map(|bi| lin(&one, bi))),
        );
        let a_v4 = product(
            std::iter::once(QPoly::monomial(one.clone(), 2 * m + n))
                .chain(a.iter().map(|ai| lin(ai, &one))),
        );
        ExpectedRestrictions {
            p_v3,
            j_v2,
            q_v4,
            a_v4,
        }
    }
}

/// Exceptional exponents and divisor restrictions of the pullbacks.
pub fn pullback_checks(p: &ParameterPoint) -> Result<Vec<Check>> {
    let (mi, ni) = (p.m() as i64, p.n() as i64);
    let want = ExpectedRestrictions::new(p);
    let mut out = Vec::new();
    let f4 = strict_transform_factorization(p, Chart::V4)?;
    out.push(Check::flag(
        "pullback.v4.exponents",
        (f4.exc_x, f4.exc_y) == (mi + ni, 2 * mi + ni),
        format!("({}, {})", f4.exc_x, f4.exc_y),
    ));
    let f3 = strict_transform_factorization(p, Chart::V3)?;
    out.push(Check::flag(
        "pullback.v3.exponent",
        f3.exc_x == 2 * mi + ni && f3.exc_y == 0,
        format!("{}", f3.exc_x),
    ));
    let f2 = strict_transform_factorization(p, Chart::V2)?;
    out.push(Check::flag(
        "pullback.v2.exponent",
        f2.exc_y == mi + ni && f2.exc_x == 0,
        format!("{}", f2.exc_y),
    ));
    out.push(Check::flag(
        "pullback.v3.restriction",
        divisor_restriction(&f3)? == want.p_v3,
        "",
    ));
    out.push(Check::flag(
        "pullback.v2.restriction",
        divisor_restriction(&f2)? == want.j_v2,
        "",
    ));
    let n4 = crate::blowup::pulled_normal_form(p, Chart::V4)?;
    out.push(Check::flag(
        "pullback.v4.restriction_y",
        n4.slice(Var::Second, 2 * mi + ni).to_unipoly()? == want.q_v4,
        "",
    ));
    out.push(Check::flag(
        "pullback.v4.restriction_x",
        n4.slice(Var::First, mi + ni).to_unipoly()? == want.a_v4,
        "",
    ));
    out.push(Check::flag(
        "pullback.transitions",
        transition_consistency(p)?,
        "",
    ));
    Ok(out)
}

/// `Θ₀` is a polynomial field and no further power of `x₄` or `y₄` divides it.
pub fn theta_zero_checks(p: &ParameterPoint) -> Result<Vec<Check>> {
    let (ex, ey) = theta_zero_exponents(p.m(), p.n());
    let t = theta_zero(p)?;
    let poly = |f: &QLaurent| f.is_polynomial();
    let sharp = theta_zero_with(p, ex + 1, ey).is_err() && theta_zero_with(p, ex, ey + 1).is_err();
    Ok(vec![
        Check::flag("theta0.polynomial", poly(&t.cx) && poly(&t.cy), ""),
        Check::flag("theta0.sharp", sharp, ""),
    ])
}

/// Restricted Bézout identities and residual orders of every level-1 local solution.
pub fn local_solution_checks(ctx: &CocycleContext) -> Result<Vec<Check>> {
    let p = ctx.point();
    let (m, n) = (p.m(), p.n());
    let mut out = Vec::new();
    for site in Site::ALL {
        let e = site.exponent(m, n);
        for dir in ctx.level_one_directions() {
            let sol = ctx.local_solution(site, &dir)?;
            let res = ctx.residual_order(&sol, e + 1)?;
            let ok = sol.restricted_identity_holds(m, n) && res.is_none_or(|r| r > e);
            let detail = match res {
                Some(r) => format!("residual order {r}, divisor exponent {e}"),
                None => format!("residual order above {}", e + 1),
            };
            out.push(Check::flag(
                &format!("bezout.{}.{}{}_{}", site.tag(), dir.family, dir.k, dir.i),
                ok,
                detail,
            ));
        }
    }
    Ok(out)
}

/// Level rows cover the basis once, with as many rows as columns on each level.
pub fn level_partition_check(m: usize, n: usize) -> Result<Check> {
    let mut rows = Vec::new();
    let mut sizes = Vec::new();
    let mut square = true;
    for k in 1..=max_level(m, n) {
        let r = level_rows(m, n, k)?;
        square &= r.len() == level_columns(m, n, k)?.len();
        sizes.push(r.len());
        rows.extend(r);
    }
    let basis = enumerate_basis(m, n)?;
    let ok = square && rows == basis && basis.len() == parameter_indices(m, n)?.len();
    Ok(Check::flag("levels.partition", ok, format!("sizes {sizes:?}")))
}

/// Every check at one parameter point.
pub fn verify_point(p: &ParameterPoint, fault: Option<Fault>) -> Result<Vec<Check>> {
    let (m, n) = (p.m(), p.n());
    let mut out = Vec::new();

    for (idx, lambda) in [rat(3, 2), rat(-2, 5)].iter().enumerate() {
        out.push(Check::flag(
            &format!("scaling.identity[{}]", idx + 1),
            verify_scaling_identity(p, lambda)?,
            format!("lambda = {}", display_rational(lambda)),
        ));
    }
    for l in 0..=n - 2 {
        out.push(Check::flag(
            &format!("structure.component[{l}]"),
            component_derivative_structure(p, l)?,
            "",
        ));
    }
    out.extend(pullback_checks(p)?);
    out.extend(theta_zero_checks(p)?);

    let ctx = CocycleContext::new(p)?;
    out.extend(local_solution_checks(&ctx)?);
    let mut prop_ok = true;
    let dirs = parameter_indices(m, n)?;
    for d in &dirs {
        prop_ok &= verify_propagation(&ctx, d)?;
    }
    out.push(Check::flag(
        "propagation",
        prop_ok,
        format!("{} directions", dirs.len()),
    ));
    out.push(level_partition_check(m, n)?);

    let full = full_matrix_in(&ctx, DEFAULT_MARGIN)?;
    let oracles = closed_form_oracles_on(&ctx, &full, fault)?;
    out.extend(oracles.checks.into_iter().map(|mut c| {
        c.name = format!("oracle.{}", c.name);
        c
    }));
    out.push(Check::flag(
        "matrix.block_lower_triangular",
        full.is_block_lower_triangular(),
        format!("blocks {:?}", full.block_sizes()),
    ));
    let det = full.det()?;
    out.push(Check::flag(
        "matrix.det_nonzero",
        !det.is_zero(),
        display_rational(&det),
    ));

    if (m, n) == (3, 3) {
        let mut ok = true;
        for k in 2..=max_level(m, n) {
            let shifted = build_level_matrix_in(&ctx, k, DEFAULT_MARGIN)?;
            ok &= resolve_level_directly(&ctx, k, DEFAULT_MARGIN)? == shifted.entries;
        }
        out.push(Check::flag("matrix.level_resolve", ok, ""));
    } else {
        out.push(Check::skipped(
            "matrix.level_resolve",
            "cross-check runs at (3,3) only",
        ));
    }
    Ok(out)
}
