//! The normal forms `N_p^(M,N)`, their parameter points, homogeneous
//! components and the ℂ*-action on parameters.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{check_range, parameter_indices, Family, ParameterIndex};
use crate::poly_core::{Exp2, Monomial, Vars};
use crate::scalar::{display_rational, format_rational, int, parse_rational, serde_rational};
use crate::{QLaurent, Rational};

/// Values of every parameter `a_{k,i}`, `b_{k,i}` for a fixed `(M, N)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "ParamDoc", try_from = "ParamDoc")]
pub struct ParameterPoint {
    m: usize,
    n: usize,
    a: BTreeMap<(usize, usize), Rational>,
    b: BTreeMap<(usize, usize), Rational>,
}

impl ParameterPoint {
    /// Builds a point and checks it lies in the admissible parameter set.
    pub fn new(
        m: usize,
        n: usize,
        a: BTreeMap<(usize, usize), Rational>,
        b: BTreeMap<(usize, usize), Rational>,
    ) -> Result<Self> {
        let p = Self::new_unchecked(m, n, a, b)?;
        p.validate()?;
        Ok(p)
    }

    /// Builds a point with the right index set, skipping the genericity conditions.
    pub fn new_unchecked(
        m: usize,
        n: usize,
        a: BTreeMap<(usize, usize), Rational>,
        b: BTreeMap<(usize, usize), Rational>,
    ) -> Result<Self> {
        check_range(m, n)?;
        let p = ParameterPoint { m, n, a, b };
        p.check_keys()?;
        Ok(p)
    }

    fn check_keys(&self) -> Result<()> {
        let want = parameter_indices(self.m, self.n)?;
        let mut have: Vec<ParameterIndex> = self
            .a
            .keys()
            .map(|&(k, i)| ParameterIndex::a(k, i))
            .chain(self.b.keys().map(|&(k, i)| ParameterIndex::b(k, i)))
            .collect();
        have.sort();
        let mut want_sorted = want;
        want_sorted.sort();
        if have != want_sorted {
            let missing: Vec<String> = want_sorted
                .iter()
                .filter(|p| !have.contains(p))
                .map(ToString::to_string)
                .collect();
            let extra: Vec<String> = have
                .iter()
                .filter(|p| !want_sorted.contains(p))
                .map(ToString::to_string)
                .collect();
            return Err(Error::InvalidParameters(format!(
                "parameter set does not match (M, N) = ({}, {}); missing [{}], unexpected [{}]",
                self.m,
                self.n,
                missing.join(", "),
                extra.join(", ")
            )));
        }
        Ok(())
    }

    /// Checks `a_{1,i} ≠ 0`, `b_{1,j} ∉ {0, 1}` and pairwise distinctness within each family.
    pub fn validate(&self) -> Result<()> {
        self.check_keys()?;
        let a1 = self.a1();
        let b1 = self.b1();
        for (i, v) in a1.iter().enumerate() {
            if v.is_zero() {
                return Err(Error::InvalidParameters(format!("a_{{1,{}}} = 0", i + 1)));
            }
        }
        for (j, v) in b1.iter().enumerate() {
            if v.is_zero() || v.is_one() {
                return Err(Error::InvalidParameters(format!(
                    "b_{{1,{}}} = {} (must differ from 0 and 1)",
                    j + 1,
                    display_rational(v)
                )));
            }
        }
        for (name, vals) in [("a", &a1), ("b", &b1)] {
            for s in 0..vals.len() {
                for t in s + 1..vals.len() {
                    if vals[s] == vals[t] {
                        return Err(Error::InvalidParameters(format!(
                            "{name}_{{1,{}}} = {name}_{{1,{}}} = {} (first-level values must be pairwise distinct)",
                            s + 1,
                            t + 1,
                            display_rational(&vals[s])
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, idx: &ParameterIndex) -> Option<&Rational> {
        match idx.family {
            Family::A => self.a.get(&(idx.k, idx.i)),
            Family::B => self.b.get(&(idx.k, idx.i)),
        }
    }

    pub fn a(&self, k: usize, i: usize) -> &Rational {
        &self.a[&(k, i)]
    }

    pub fn b(&self, k: usize, i: usize) -> &Rational {
        &self.b[&(k, i)]
    }

    /// `a_{1,1}, …, a_{1,N−1}`.
    pub fn a1(&self) -> Vec<Rational> {
        (1..self.n).map(|i| self.a(1, i).clone()).collect()
    }

    /// `b_{1,1}, …, b_{1,M−2}`.
    pub fn b1(&self) -> Vec<Rational> {
        (1..=self.m.saturating_sub(2))
            .map(|i| self.b(1, i).clone())
            .collect()
    }

    /// `∏ a_{1,i}`.
    pub fn prod_a1(&self) -> Rational {
        self.a1().iter().fold(Rational::one(), |acc, v| acc * v)
    }

    pub fn len(&self) -> usize {
        self.a.len() + self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All values in parameter-index order.
    pub fn entries(&self) -> Vec<(ParameterIndex, Rational)> {
        let mut out: Vec<_> = self
            .a
            .iter()
            .map(|(&(k, i), v)| (ParameterIndex::a(k, i), v.clone()))
            .chain(
                self.b
                    .iter()
                    .map(|(&(k, i), v)| (ParameterIndex::b(k, i), v.clone())),
            )
            .collect();
        out.sort_by_key(|x| x.0);
        out
    }

    /// Copy with one value replaced; the result is not revalidated.
    pub fn with_value(&self, idx: &ParameterIndex, v: Rational) -> Result<Self> {
        let mut p = self.clone();
        let slot = match idx.family {
            Family::A => p.a.get_mut(&(idx.k, idx.i)),
            Family::B => p.b.get_mut(&(idx.k, idx.i)),
        };
        match slot {
            Some(s) => *s = v,
            None => {
                return Err(Error::InvalidInput(format!(
                    "{idx} is not a parameter for (M, N) = ({}, {})",
                    self.m, self.n
                )))
            }
        }
        Ok(p)
    }
}

#[derive(Clone, Serialize, Deserialize)]
struct ParamEntry {
    family: Family,
    k: usize,
    i: usize,
    #[serde(with = "serde_rational")]
    value: Rational,
}

#[derive(Clone, Serialize, Deserialize)]
struct ParamDoc {
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "N")]
    n: usize,
    values: Vec<ParamEntry>,
}

impl From<ParameterPoint> for ParamDoc {
    fn from(p: ParameterPoint) -> Self {
        ParamDoc {
            m: p.m,
            n: p.n,
            values: p
                .entries()
                .into_iter()
                .map(|(idx, value)| ParamEntry {
                    family: idx.family,
                    k: idx.k,
                    i: idx.i,
                    value,
                })
                .collect(),
        }
    }
}

impl TryFrom<ParamDoc> for ParameterPoint {
    type Error = Error;
    fn try_from(d: ParamDoc) -> Result<Self> {
        let mut a = BTreeMap::new();
        let mut b = BTreeMap::new();
        for e in d.values {
            let map = match e.family {
                Family::A => &mut a,
                Family::B => &mut b,
            };
            map.insert((e.k, e.i), e.value);
        }
        ParameterPoint::new(d.m, d.n, a, b)
    }
}

fn draw(rng: &mut ChaCha8Rng) -> Rational {
    let num: i64 = rng.gen_range(-20..=20);
    let den: i64 = rng.gen_range(1..=8);
    Rational::new(num.into(), den.into())
}

/// Deterministic generic point: numerators in `[−20, 20]`, denominators in `[1, 8]`,
/// first-level values redrawn until the admissibility conditions hold.
pub fn sample_generic_parameters(m: usize, n: usize, seed: u64) -> Result<ParameterPoint> {
    check_range(m, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = BTreeMap::new();
    let mut b = BTreeMap::new();
    let mut a1: Vec<Rational> = Vec::new();
    let mut b1: Vec<Rational> = Vec::new();
    for idx in parameter_indices(m, n)? {
        let v = loop {
            let v = draw(&mut rng);
            if idx.k != 1 {
                break v;
            }
            match idx.family {
                Family::A if !v.is_zero() && !a1.contains(&v) => {
                    a1.push(v.clone());
                    break v;
                }
                Family::B if !v.is_zero() && !v.is_one() && !b1.contains(&v) => {
                    b1.push(v.clone());
                    break v;
                }
                _ => continue,
            }
        };
        match idx.family {
            Family::A => a.insert((idx.k, idx.i), v),
            Family::B => b.insert((idx.k, idx.i), v),
        };
    }
    ParameterPoint::new(m, n, a, b)
}

/// A polynomial in the ambient coordinates `(x, y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanePoly(QLaurent);

impl PlanePoly {
    pub fn new(f: QLaurent) -> Result<Self> {
        if !f.is_polynomial() {
            return Err(Error::InvalidInput(
                "plane polynomial with a negative exponent".into(),
            ));
        }
        Ok(PlanePoly(f.with_vars(Vars::XY)))
    }

    pub fn as_laurent(&self) -> &QLaurent {
        &self.0
    }

    pub fn into_laurent(self) -> QLaurent {
        self.0
    }

    pub fn lowest_degree(&self) -> Option<i64> {
        self.0.min_total_degree()
    }
}

impl fmt::Display for PlanePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn xy_term(c: Rational, i: i64, j: i64) -> QLaurent {
    QLaurent::monomial(Vars::XY, c, i, j)
}

/// The factors `xy`, `y + x²`, `y + Σ a_{k,i} x y^{k−1}`, `y + Σ b_{k,i} x^{k+1}`.
pub fn normal_form_factors(p: &ParameterPoint) -> Vec<QLaurent> {
    let y = xy_term(int(1), 0, 1);
    let mut out = vec![xy_term(int(1), 1, 1), &y + &xy_term(int(1), 2, 0)];
    for i in 1..p.n {
        let mut f = y.clone();
        for k in 1..=i {
            f.add_term((1, k as i64 - 1), p.a(k, i).clone());
        }
        out.push(f);
    }
    for i in 1..=p.m.saturating_sub(2) {
        let mut f = y.clone();
        for k in 1..=(p.n - 1 + 2 * i) {
            f.add_term((k as i64 + 1, 0), p.b(k, i).clone());
        }
        out.push(f);
    }
    out
}

pub fn build_normal_form(p: &ParameterPoint) -> PlanePoly {
    PlanePoly(cleared_product(&normal_form_factors(p), Vars::XY))
}

/// Product of the factors, multiplied out over the integers after clearing
/// denominators and rescaled once at the end. Rational arithmetic reduces by a
/// gcd after every operation, which dominates the cost otherwise.
pub fn cleared_product(factors: &[QLaurent], vars: Vars) -> QLaurent {
    let mut den = BigInt::one();
    let mut acc: BTreeMap<Exp2, BigInt> = BTreeMap::from([((0, 0), BigInt::one())]);
    for f in factors {
        let d = f.terms().fold(BigInt::one(), |l, (_, c)| l.lcm(c.denom()));
        let g: Vec<(Exp2, BigInt)> = f
            .terms()
            .map(|(e, c)| (*e, c.numer() * (&d / c.denom())))
            .collect();
        let mut next: BTreeMap<Exp2, BigInt> = BTreeMap::new();
        for (a, ca) in &acc {
            for (b, cb) in &g {
                *next.entry((a.0 + b.0, a.1 + b.1)).or_default() += ca * cb;
            }
        }
        next.retain(|_, c| !c.is_zero());
        acc = next;
        den *= d;
    }
    QLaurent::from_terms(
        vars,
        acc.into_iter()
            .map(|(e, c)| (e, Rational::new(c, den.clone()))),
    )
}

/// Human-readable product of the factors.
pub fn factored_display(p: &ParameterPoint) -> String {
    let fmt_factor = |f: &QLaurent| -> String {
        let mut keys: Vec<((i64, i64), Rational)> =
            f.terms().map(|(e, c)| (*e, c.clone())).collect();
        // The bare `y` first, then increasing powers of x.
        keys.sort_by_key(|(e, _)| (*e != (0, 1), e.0, e.1));
        let parts: Vec<String> = keys
            .iter()
            .map(|((i, j), c)| {
                let mut s = String::new();
                if !c.is_one() {
                    s.push_str(&format!("({})", display_rational(c)));
                }
                for (name, e) in [("x", *i), ("y", *j)] {
                    match e {
                        0 => {}
                        1 => s.push_str(name),
                        _ => s.push_str(&format!("{name}^{e}")),
                    }
                }
                if s.is_empty() {
                    s.push('1');
                }
                s
            })
            .collect();
        parts.join(" + ")
    };
    let fs = normal_form_factors(p);
    let mut out = String::from("xy");
    for f in &fs[1..] {
        out.push_str(&format!("({})", fmt_factor(f)));
    }
    out
}

/// Terms of total degree exactly `d`.
pub fn homogeneous_component(f: &PlanePoly, d: i64) -> PlanePoly {
    PlanePoly(f.0.homogeneous_part(d))
}

/// `λ·p = (λ^{2k−3} a_{k,i}, λ^{k−1} b_{k,i})`.
pub fn scale_parameters(p: &ParameterPoint, lambda: &Rational) -> Result<ParameterPoint> {
    if lambda.is_zero() {
        return Err(Error::InvalidInput("scaling by zero".into()));
    }
    let a = p
        .a
        .iter()
        .map(|(&(k, i), v)| ((k, i), v * scalar_pow(lambda, 2 * k as i64 - 3)))
        .collect();
    let b = p
        .b
        .iter()
        .map(|(&(k, i), v)| ((k, i), v * scalar_pow(lambda, k as i64 - 1)))
        .collect();
    ParameterPoint::new(p.m, p.n, a, b)
}

fn scalar_pow(x: &Rational, e: i64) -> Rational {
    use crate::Scalar;
    x.pow_i(e)
}

/// Checks `N_p(λx, λ²y) = λ^{2M+2N−1} N_{λ·p}(x, y)` term by term.
pub fn verify_scaling_identity(p: &ParameterPoint, lambda: &Rational) -> Result<bool> {
    let scaled = scale_parameters(p, lambda)?;
    let lhs = build_normal_form(p).0.substitute_monomial(
        &Monomial::new(lambda.clone(), 1, 0),
        &Monomial::new(lambda * lambda, 0, 1),
        Vars::XY,
    )?;
    let e = 2 * (p.m + p.n) as i64 - 1;
    let rhs = build_normal_form(&scaled).0.scale(&scalar_pow(lambda, e));
    Ok(lhs == rhs)
}

/// Position of the factor of [`normal_form_factors`] containing a parameter,
/// and the exponent of the monomial that parameter multiplies there.
pub fn parameter_factor(p: &ParameterPoint, idx: &ParameterIndex) -> Result<(usize, Exp2)> {
    if !idx.is_legal(p.m, p.n) {
        return Err(Error::InvalidInput(format!("{idx} is not a parameter")));
    }
    let k = idx.k as i64;
    Ok(match idx.family {
        Family::A => (1 + idx.i, (1, k - 1)),
        Family::B => (p.n + idx.i, (k + 1, 0)),
    })
}

/// Product of all factors but one.
pub fn product_except(factors: &[QLaurent], skip: usize, vars: Vars) -> QLaurent {
    let rest: Vec<QLaurent> = factors
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != skip)
        .map(|(_, f)| f.clone())
        .collect();
    cleared_product(&rest, vars)
}

/// Exact derivative of the normal form in one parameter: the parameter enters
/// one factor linearly, so the derivative is the product of the other factors
/// times the monomial it multiplies.
pub fn parameter_derivative(p: &ParameterPoint, idx: &ParameterIndex) -> Result<QLaurent> {
    let (f, (i, j)) = parameter_factor(p, idx)?;
    Ok(product_except(&normal_form_factors(p), f, Vars::XY).shift(i, j))
}

/// Checks the derivative structure of the degree `M+N+l` component:
/// `∂/∂a_{l+1,i} = x y^l N^{(M+N)}/(y + a_{1,i} x)` and, for `l ≥ 1`,
/// `∂/∂b_{l,i} = x^{l+1} N^{(M+N)}/y`.
pub fn component_derivative_structure(p: &ParameterPoint, l: usize) -> Result<bool> {
    if l + 2 > p.n {
        return Err(Error::OutOfRange {
            what: "l",
            value: l as i64,
            lo: 0,
            hi: p.n as i64 - 2,
        });
    }
    let d0 = (p.m + p.n) as i64;
    let lowest = homogeneous_component(&build_normal_form(p), d0).0;
    let li = l as i64;
    for i in l + 1..p.n {
        let idx = ParameterIndex::a(l + 1, i);
        let got = parameter_derivative(p, &idx)?.homogeneous_part(d0 + li);
        let lin = &xy_term(int(1), 0, 1) + &xy_term(p.a(1, i).clone(), 1, 0);
        let want = lowest.div_exact(&lin)?.shift(1, li);
        if got != want {
            return Ok(false);
        }
    }
    if l >= 1 {
        for i in 1..=p.m.saturating_sub(2) {
            let idx = ParameterIndex::b(l, i);
            if !idx.is_legal(p.m, p.n) {
                continue;
            }
            let got = parameter_derivative(p, &idx)?.homogeneous_part(d0 + li);
            let want = lowest.div_monomial_holomorphic(0, 1)?.shift(li + 1, 0);
            if got != want {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Serializes a point as `M`, `N` lines followed by `a k i value` / `b k i value` lines.
pub fn write_params(p: &ParameterPoint) -> String {
    let mut s = format!("M {}\nN {}\n", p.m, p.n);
    for (idx, v) in p.entries() {
        s.push_str(&format!(
            "{} {} {} {}\n",
            idx.family,
            idx.k,
            idx.i,
            format_rational(&v)
        ));
    }
    s
}

/// Parses the format of [`write_params`]; `#` starts a comment. The point is validated.
pub fn read_params(text: &str) -> Result<ParameterPoint> {
    let mut m = None;
    let mut n = None;
    let mut a = BTreeMap::new();
    let mut b = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let int_field = |s: &str| -> Result<usize> {
            s.parse::<usize>()
                .map_err(|_| err(format!("expected a non-negative integer, got {s:?}")))
        };
        match fields.as_slice() {
            ["M", v] => m = Some(int_field(v)?),
            ["N", v] => n = Some(int_field(v)?),
            [fam @ ("a" | "b"), k, i, v] => {
                let k = int_field(k)?;
                let i = int_field(i)?;
                let v = parse_rational(v).map_err(|e| err(e.to_string()))?;
                let map = if *fam == "a" { &mut a } else { &mut b };
                if map.insert((k, i), v).is_some() {
                    return Err(err(format!("duplicate entry {fam} {k} {i}")));
                }
            }
            _ => return Err(err(format!("unrecognized line {line:?}"))),
        }
    }
    let m = m.ok_or_else(|| Error::Parse {
        line: 0,
        msg: "missing M".into(),
    })?;
    let n = n.ok_or_else(|| Error::Parse {
        line: 0,
        msg: "missing N".into(),
    })?;
    ParameterPoint::new(m, n, a, b)
}
