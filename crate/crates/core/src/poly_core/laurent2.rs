use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::series::Series;
use super::unipoly::UniPoly;

/// Exponent pair `(i, j)` of `u^i v^j`.
pub type Exp2 = (i64, i64);

/// Labels of the two variables, used only for display.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Vars(pub &'static str, pub &'static str);

impl Vars {
    pub const XY: Vars = Vars("x", "y");
}

/// Which of the two variables an operation refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    First,
    Second,
}

impl Var {
    pub fn other(self) -> Var {
        match self {
            Var::First => Var::Second,
            Var::Second => Var::First,
        }
    }

    fn pick(self, e: Exp2) -> i64 {
        match self {
            Var::First => e.0,
            Var::Second => e.1,
        }
    }
}

/// A single term `c·u^i v^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial<T> {
    pub coeff: T,
    pub exp: Exp2,
}

impl<T: Scalar> Monomial<T> {
    pub fn new(coeff: T, i: i64, j: i64) -> Self {
        Monomial { coeff, exp: (i, j) }
    }

    pub fn unit(i: i64, j: i64) -> Self {
        Self::new(T::one(), i, j)
    }

    /// `self^e` for any integer `e` (the coefficient must be nonzero when `e < 0`).
    pub fn pow(&self, e: i64) -> Self {
        Monomial {
            coeff: self.coeff.pow_i(e),
            exp: (self.exp.0 * e, self.exp.1 * e),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Monomial {
            coeff: self.coeff.clone() * other.coeff.clone(),
            exp: (self.exp.0 + other.exp.0, self.exp.1 + other.exp.1),
        }
    }
}

/// Sparse Laurent polynomial in two variables. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Debug)]
pub struct LaurentPoly2<T> {
    terms: BTreeMap<Exp2, T>,
    vars: Vars,
}

impl<T: Scalar> LaurentPoly2<T> {
    pub fn zero(vars: Vars) -> Self {
        LaurentPoly2 {
            terms: BTreeMap::new(),
            vars,
        }
    }

    pub fn constant(vars: Vars, c: T) -> Self {
        Self::monomial(vars, c, 0, 0)
    }

    pub fn one(vars: Vars) -> Self {
        Self::constant(vars, T::one())
    }

    pub fn monomial(vars: Vars, c: T, i: i64, j: i64) -> Self {
        let mut p = Self::zero(vars);
        p.add_term((i, j), c);
        p
    }

    pub fn from_monomial(vars: Vars, m: &Monomial<T>) -> Self {
        Self::monomial(vars, m.coeff.clone(), m.exp.0, m.exp.1)
    }

    pub fn var(vars: Vars, which: Var) -> Self {
        match which {
            Var::First => Self::monomial(vars, T::one(), 1, 0),
            Var::Second => Self::monomial(vars, T::one(), 0, 1),
        }
    }

    pub fn from_terms<I: IntoIterator<Item = (Exp2, T)>>(vars: Vars, terms: I) -> Self {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    /// Embeds a univariate polynomial in the chosen variable.
    pub fn from_unipoly(vars: Vars, which: Var, p: &UniPoly<T>) -> Self {
        Self::from_terms(
            vars,
            p.coeffs().iter().enumerate().map(|(d, c)| {
                let d = d as i64;
                let e = match which {
                    Var::First => (d, 0),
                    Var::Second => (0, d),
                };
                (e, c.clone())
            }),
        )
    }

    pub fn vars(&self) -> Vars {
        self.vars
    }

    pub fn with_vars(mut self, vars: Vars) -> Self {
        self.vars = vars;
        self
    }

    pub fn add_term(&mut self, e: Exp2, c: T) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&e) {
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert(e, s);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exp2, &T)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, i: i64, j: i64) -> T {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(T::zero)
    }

    pub fn scale(&self, s: &T) -> Self {
        if s.is_zero() {
            return Self::zero(self.vars);
        }
        LaurentPoly2 {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (*e, c.clone() * s.clone()))
                .collect(),
            vars: self.vars,
        }
    }

    pub fn mul_monomial(&self, m: &Monomial<T>) -> Self {
        if m.coeff.is_zero() {
            return Self::zero(self.vars);
        }
        LaurentPoly2 {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| ((e.0 + m.exp.0, e.1 + m.exp.1), c.clone() * m.coeff.clone()))
                .collect(),
            vars: self.vars,
        }
    }

    pub fn shift(&self, di: i64, dj: i64) -> Self {
        LaurentPoly2 {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| ((e.0 + di, e.1 + dj), c.clone()))
                .collect(),
            vars: self.vars,
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(self.vars), |acc, _| &acc * self)
    }

    /// Smallest exponent of the chosen variable, `None` for the zero polynomial.
    pub fn min_exp(&self, which: Var) -> Option<i64> {
        self.terms.keys().map(|&e| which.pick(e)).min()
    }

    /// Terms whose exponent in `which` is at most `max`.
    pub fn truncate_exp(&self, which: Var, max: i64) -> Self {
        LaurentPoly2 {
            terms: self
                .terms
                .iter()
                .filter(|&(&e, _)| which.pick(e) <= max)
                .map(|(&e, c)| (e, c.clone()))
                .collect(),
            vars: self.vars,
        }
    }

    pub fn max_exp(&self, which: Var) -> Option<i64> {
        self.terms.keys().map(|&e| which.pick(e)).max()
    }

    pub fn max_total_degree(&self) -> Option<i64> {
        self.terms.keys().map(|e| e.0 + e.1).max()
    }

    pub fn min_total_degree(&self) -> Option<i64> {
        self.terms.keys().map(|e| e.0 + e.1).min()
    }

    /// True when no exponent is negative.
    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|e| e.0 >= 0 && e.1 >= 0)
    }

    /// Terms whose exponents sum to `d`.
    pub fn homogeneous_part(&self, d: i64) -> Self {
        LaurentPoly2 {
            terms: self
                .terms
                .iter()
                .filter(|&(e, _)| e.0 + e.1 == d)
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
            vars: self.vars,
        }
    }

    /// Partial derivative with respect to the chosen variable.
    pub fn derivative(&self, which: Var) -> Self {
        Self::from_terms(
            self.vars,
            self.terms.iter().filter_map(|(&e, c)| {
                let k = which.pick(e);
                if k == 0 {
                    return None;
                }
                let ne = match which {
                    Var::First => (e.0 - 1, e.1),
                    Var::Second => (e.0, e.1 - 1),
                };
                Some((ne, c.clone() * T::from_int(k)))
            }),
        )
    }

    /// Coefficient of `var^k` as a univariate Laurent polynomial in the other variable,
    /// returned as an exact series.
    pub fn slice(&self, which: Var, k: i64) -> Series<T> {
        let other = which.other();
        let pairs: Vec<(i64, T)> = self
            .terms
            .iter()
            .filter(|&(&e, _)| which.pick(e) == k)
            .map(|(&e, c)| (other.pick(e), c.clone()))
            .collect();
        Series::from_pairs(pairs)
    }

    /// All slices along the chosen variable, keyed by its exponent.
    pub fn slices(&self, which: Var) -> BTreeMap<i64, Series<T>> {
        let mut grouped: BTreeMap<i64, Vec<(i64, T)>> = BTreeMap::new();
        let other = which.other();
        for (&e, c) in &self.terms {
            grouped
                .entry(which.pick(e))
                .or_default()
                .push((other.pick(e), c.clone()));
        }
        grouped
            .into_iter()
            .map(|(k, v)| (k, Series::from_pairs(v)))
            .collect()
    }

    /// Restriction to `var = 0`; only meaningful when no negative powers of `var` occur.
    pub fn restrict_zero(&self, which: Var) -> Result<UniPoly<T>> {
        if self.min_exp(which).is_some_and(|m| m < 0) {
            return Err(Error::InvalidInput(
                "restriction to a pole divisor is undefined".into(),
            ));
        }
        let s = self.slice(which, 0);
        s.to_unipoly()
    }

    /// Substitutes a monomial for each variable. The result lives in `new_vars`.
    pub fn substitute_monomial(
        &self,
        image_first: &Monomial<T>,
        image_second: &Monomial<T>,
        new_vars: Vars,
    ) -> Result<Self> {
        if image_first.coeff.is_zero() || image_second.coeff.is_zero() {
            return Err(Error::InvalidInput(
                "monomial substitution needs nonzero images".into(),
            ));
        }
        let mut out = Self::zero(new_vars);
        let mut pow_cache: BTreeMap<(bool, i64), Monomial<T>> = BTreeMap::new();
        for (&(i, j), c) in &self.terms {
            let mi = pow_cache
                .entry((false, i))
                .or_insert_with(|| image_first.pow(i))
                .clone();
            let mj = pow_cache
                .entry((true, j))
                .or_insert_with(|| image_second.pow(j))
                .clone();
            let m = mi.mul(&mj);
            out.add_term(m.exp, c.clone() * m.coeff);
        }
        Ok(out)
    }

    /// Divides by `u^i v^j`, failing if a negative exponent would appear.
    pub fn div_monomial_holomorphic(&self, i: i64, j: i64) -> Result<Self> {
        let q = self.shift(-i, -j);
        if q.is_polynomial() {
            Ok(q)
        } else {
            Err(Error::InexactDivision(format!(
                "division by the monomial with exponents ({i}, {j}) leaves a pole"
            )))
        }
    }

    /// Largest `(i, j)` such that `u^i v^j` divides every term.
    pub fn monomial_content(&self) -> Option<Exp2> {
        Some((self.min_exp(Var::First)?, self.min_exp(Var::Second)?))
    }

    /// Exact quotient by a nonzero Laurent polynomial, or an error when the
    /// quotient is not a Laurent polynomial.
    pub fn div_exact(&self, divisor: &Self) -> Result<Self> {
        let (&lead_d, lead_c) = divisor
            .terms
            .iter()
            .next_back()
            .ok_or_else(|| Error::InvalidInput("division by the zero polynomial".into()))?;
        let mut quotient = Self::zero(self.vars);
        if self.is_zero() {
            return Ok(quotient);
        }
        // Extreme exponents add under multiplication, so an exact quotient lives in this box.
        let bound = |w: Var| {
            (
                self.min_exp(w).unwrap() - divisor.min_exp(w).unwrap(),
                self.max_exp(w).unwrap() - divisor.max_exp(w).unwrap(),
            )
        };
        let (b1, b2) = (bound(Var::First), bound(Var::Second));
        let mut rem = self.clone();
        while let Some((&e, c)) = rem.terms.iter().next_back() {
            let qe = (e.0 - lead_d.0, e.1 - lead_d.1);
            if qe.0 < b1.0 || qe.0 > b1.1 || qe.1 < b2.0 || qe.1 > b2.1 {
                return Err(Error::InexactDivision(
                    "Laurent polynomial division leaves a remainder".into(),
                ));
            }
            let qc = c.clone() / lead_c.clone();
            let t = Monomial {
                coeff: qc.clone(),
                exp: qe,
            };
            rem = &rem - &divisor.mul_monomial(&t);
            quotient.add_term(qe, qc);
        }
        Ok(quotient)
    }
}

impl<T: Scalar> Add for &LaurentPoly2<T> {
    type Output = LaurentPoly2<T>;
    fn add(self, rhs: &LaurentPoly2<T>) -> LaurentPoly2<T> {
        let mut out = self.clone();
        for (&e, c) in &rhs.terms {
            out.add_term(e, c.clone());
        }
        out
    }
}

impl<T: Scalar> Sub for &LaurentPoly2<T> {
    type Output = LaurentPoly2<T>;
    fn sub(self, rhs: &LaurentPoly2<T>) -> LaurentPoly2<T> {
        let mut out = self.clone();
        for (&e, c) in &rhs.terms {
            out.add_term(e, -c.clone());
        }
        out
    }
}

impl<T: Scalar> Mul for &LaurentPoly2<T> {
    type Output = LaurentPoly2<T>;
    fn mul(self, rhs: &LaurentPoly2<T>) -> LaurentPoly2<T> {
        let mut acc: BTreeMap<Exp2, T> = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                let mut p = ca.clone();
                p *= cb;
                match acc.entry((a.0 + b.0, a.1 + b.1)) {
                    Entry::Occupied(mut o) => *o.get_mut() += p,
                    Entry::Vacant(v) => {
                        v.insert(p);
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        LaurentPoly2 {
            terms: acc,
            vars: self.vars,
        }
    }
}

impl<T: Scalar> Neg for &LaurentPoly2<T> {
    type Output = LaurentPoly2<T>;
    fn neg(self) -> LaurentPoly2<T> {
        self.scale(&-T::one())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<T: Scalar> $tr for LaurentPoly2<T> {
            type Output = LaurentPoly2<T>;
            fn $m(self, rhs: LaurentPoly2<T>) -> LaurentPoly2<T> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<T: Scalar + fmt::Display> fmt::Display for LaurentPoly2<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let Vars(u, v) = self.vars;
        let mut first = true;
        // Highest total degree first, then by decreasing power of the first variable.
        let mut keys: Vec<&Exp2> = self.terms.keys().collect();
        keys.sort_by_key(|e| std::cmp::Reverse((e.0 + e.1, e.0)));
        for e in keys {
            let c = &self.terms[e];
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut parts = vec![format!("({c})")];
            for (name, k) in [(u, e.0), (v, e.1)] {
                match k {
                    0 => {}
                    1 => parts.push(name.to_string()),
                    _ => parts.push(format!("{name}^{k}")),
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};
    use crate::QLaurent;

    const V4: Vars = Vars("x4", "y4");
    const V3: Vars = Vars("x3", "y3");
    const V2: Vars = Vars("x2", "y2");

    fn mono(c: i64, i: i64, j: i64) -> Monomial<crate::Rational> {
        Monomial::new(int(c), i, j)
    }

    #[test]
    fn substitute_into_product_of_variables() {
        let f = QLaurent::monomial(Vars::XY, int(1), 1, 1);
        let g = f
            .substitute_monomial(&mono(1, 1, 1), &mono(1, 1, 2), V4)
            .unwrap();
        assert_eq!(g, QLaurent::monomial(V4, int(1), 2, 3));
    }

    #[test]
    fn chart_transition_of_y3() {
        // y3 under x3 = x4 y4, y3 = 1/x4.
        let f = QLaurent::monomial(V3, int(1), 0, 1);
        let g = f
            .substitute_monomial(&mono(1, 1, 1), &mono(1, -1, 0), V4)
            .unwrap();
        assert_eq!(g, QLaurent::monomial(V4, int(1), -1, 0));
    }

    #[test]
    fn x2_squared_y2_is_x4() {
        let f = QLaurent::monomial(V2, int(1), 2, 1);
        let g = f
            .substitute_monomial(&mono(1, 0, -1), &mono(1, 1, 2), V4)
            .unwrap();
        assert_eq!(g, QLaurent::monomial(V4, int(1), 1, 0));
    }

    #[test]
    fn zero_image_is_rejected() {
        let f = QLaurent::monomial(V4, int(1), 1, 0);
        let zero = Monomial::new(int(0), 1, 0);
        assert!(f.substitute_monomial(&zero, &mono(1, 0, 1), V4).is_err());
    }

    #[test]
    fn exact_division() {
        let x = QLaurent::var(Vars::XY, Var::First);
        let y = QLaurent::var(Vars::XY, Var::Second);
        let a = &y + &x.scale(&rat(3, 2));
        let b = &(&x * &y) - &y.pow(2).shift(-2, 0);
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&a).unwrap(), b);
        assert_eq!(prod.div_exact(&b).unwrap(), a);
        assert!((&prod + &QLaurent::one(Vars::XY)).div_exact(&a).is_err());
    }

    #[test]
    fn holomorphic_monomial_division() {
        let f = QLaurent::from_terms(V4, [((2, 3), int(1)), ((4, 1), int(2))]);
        assert!(f.div_monomial_holomorphic(2, 1).is_ok());
        assert!(f.div_monomial_holomorphic(2, 2).is_err());
        assert_eq!(f.monomial_content(), Some((2, 1)));
    }

    #[test]
    fn derivative_and_homogeneous_parts() {
        let f = QLaurent::from_terms(Vars::XY, [((1, 2), int(1)), ((3, 1), int(1))]);
        assert_eq!(
            f.derivative(Var::First),
            QLaurent::from_terms(Vars::XY, [((0, 2), int(1)), ((2, 1), int(3))])
        );
        assert_eq!(f.homogeneous_part(3), QLaurent::monomial(Vars::XY, int(1), 1, 2));
        assert_eq!(f.homogeneous_part(4), QLaurent::monomial(Vars::XY, int(1), 3, 1));
    }
}
