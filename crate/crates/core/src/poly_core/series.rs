use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::laurent2::{LaurentPoly2, Var};
use super::unipoly::UniPoly;

/// Truncated univariate Laurent series `Σ c_k t^k + O(t^prec)`.
///
/// `prec == None` marks an exact (finite) series. Coefficients at or above
/// `prec` are unknown and never stored.
#[derive(Clone, PartialEq, Debug)]
pub struct Series<T> {
    start: i64,
    coeffs: Vec<T>,
    prec: Option<i64>,
}

impl<T: Scalar> Series<T> {
    pub fn zero() -> Self {
        Series {
            start: 0,
            coeffs: Vec::new(),
            prec: None,
        }
    }

    /// The unknown series `O(t^prec)`.
    pub fn big_o(prec: i64) -> Self {
        Series {
            start: prec,
            coeffs: Vec::new(),
            prec: Some(prec),
        }
    }

    pub fn from_pairs<I: IntoIterator<Item = (i64, T)>>(pairs: I) -> Self {
        let mut map: BTreeMap<i64, T> = BTreeMap::new();
        for (k, c) in pairs {
            let slot = map.entry(k).or_insert_with(T::zero);
            *slot += c;
        }
        map.retain(|_, c| !c.is_zero());
        let Some((&lo, _)) = map.iter().next() else {
            return Self::zero();
        };
        let hi = *map.keys().next_back().unwrap();
        let mut coeffs = vec![T::zero(); (hi - lo + 1) as usize];
        for (k, c) in map {
            coeffs[(k - lo) as usize] = c;
        }
        Series {
            start: lo,
            coeffs,
            prec: None,
        }
    }

    pub fn from_unipoly(p: &UniPoly<T>) -> Self {
        Self::from_pairs(
            p.coeffs()
                .iter()
                .enumerate()
                .map(|(k, c)| (k as i64, c.clone())),
        )
    }

    fn from_raw(start: i64, coeffs: Vec<T>, prec: Option<i64>) -> Self {
        let mut s = Series {
            start,
            coeffs,
            prec,
        };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        if let Some(p) = self.prec {
            let keep = (p - self.start).clamp(0, self.coeffs.len() as i64) as usize;
            self.coeffs.truncate(keep);
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.start += lead as i64;
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.start = self.prec.unwrap_or(0);
        }
    }

    pub fn prec(&self) -> Option<i64> {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    /// Exponent of the first nonzero coefficient, if one is known.
    pub fn valuation(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.start)
    }

    /// True when every known coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `t^k`, or an error when `k` lies beyond the precision.
    pub fn coeff(&self, k: i64) -> Result<T> {
        if let Some(p) = self.prec {
            if k >= p {
                return Err(Error::InternalConsistency(format!(
                    "coefficient of t^{k} requested from a series known only below t^{p}"
                )));
            }
        }
        let idx = k - self.start;
        if idx < 0 || idx >= self.coeffs.len() as i64 {
            Ok(T::zero())
        } else {
            Ok(self.coeffs[idx as usize].clone())
        }
    }

    /// Known nonzero terms as `(exponent, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &T)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(k, c)| (self.start + k as i64, c))
    }

    /// Drops everything at or above `t^prec`.
    pub fn truncate(&self, prec: i64) -> Self {
        let p = match self.prec {
            Some(q) => q.min(prec),
            None => prec,
        };
        Self::from_raw(self.start, self.coeffs.clone(), Some(p))
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        Series {
            start: self.start + k,
            coeffs: self.coeffs.clone(),
            prec: self.prec.map(|p| p + k),
        }
    }

    pub fn scale(&self, s: &T) -> Self {
        Self::from_raw(
            self.start,
            self.coeffs.iter().map(|c| c.clone() * s.clone()).collect(),
            self.prec,
        )
    }

    /// Converts an exact series with no negative powers into a polynomial.
    pub fn to_unipoly(&self) -> Result<UniPoly<T>> {
        if !self.is_exact() {
            return Err(Error::InvalidInput(
                "a truncated series is not a polynomial".into(),
            ));
        }
        if self.is_zero() {
            return Ok(UniPoly::zero());
        }
        if self.start < 0 {
            return Err(Error::InvalidInput(
                "series has negative powers".into(),
            ));
        }
        let mut c = vec![T::zero(); self.start as usize];
        c.extend(self.coeffs.iter().cloned());
        Ok(UniPoly::from_coeffs(c))
    }

    /// Multiplicative inverse known to `rel` terms past the leading one.
    pub fn inverse(&self, rel: usize) -> Result<Self> {
        let v = self.valuation().ok_or_else(|| {
            Error::InexactDivision("inverse of a series with no known nonzero term".into())
        })?;
        let avail = match self.prec {
            Some(p) => ((p - v) as usize).min(rel),
            None => rel,
        };
        let a = &self.coeffs;
        let a0_inv = T::one() / a[0].clone();
        let mut b: Vec<T> = Vec::with_capacity(avail);
        for n in 0..avail {
            if n == 0 {
                b.push(a0_inv.clone());
                continue;
            }
            let mut s = T::zero();
            for i in 1..=n.min(a.len() - 1) {
                let mut t = a[i].clone();
                t *= &b[n - i];
                s += t;
            }
            b.push(-(a0_inv.clone() * s));
        }
        Ok(Self::from_raw(-v, b, Some(-v + avail as i64)))
    }
}

fn min_prec(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl<T: Scalar> Add for &Series<T> {
    type Output = Series<T>;
    fn add(self, rhs: &Series<T>) -> Series<T> {
        if self.coeffs.is_empty() && rhs.coeffs.is_empty() {
            let p = min_prec(self.prec, rhs.prec);
            return Series::from_raw(p.unwrap_or(0), Vec::new(), p);
        }
        let prec = min_prec(self.prec, rhs.prec);
        let lo = match (self.coeffs.is_empty(), rhs.coeffs.is_empty()) {
            (true, _) => rhs.start,
            (_, true) => self.start,
            _ => self.start.min(rhs.start),
        };
        let hi = (self.start + self.coeffs.len() as i64).max(rhs.start + rhs.coeffs.len() as i64);
        let hi = match prec {
            Some(p) => hi.min(p),
            None => hi,
        };
        let lo = lo.min(hi);
        let mut c = vec![T::zero(); (hi - lo) as usize];
        for (k, v) in self.coeffs.iter().enumerate() {
            let e = self.start + k as i64;
            if e < hi {
                c[(e - lo) as usize] += v;
            }
        }
        for (k, v) in rhs.coeffs.iter().enumerate() {
            let e = rhs.start + k as i64;
            if e < hi {
                c[(e - lo) as usize] += v;
            }
        }
        Series::from_raw(lo, c, prec)
    }
}

impl<T: Scalar> Neg for &Series<T> {
    type Output = Series<T>;
    fn neg(self) -> Series<T> {
        Series {
            start: self.start,
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
            prec: self.prec,
        }
    }
}

impl<T: Scalar> Sub for &Series<T> {
    type Output = Series<T>;
    fn sub(self, rhs: &Series<T>) -> Series<T> {
        self + &(-rhs)
    }
}

impl<T: Scalar> Mul for &Series<T> {
    type Output = Series<T>;
    fn mul(self, rhs: &Series<T>) -> Series<T> {
        let exact_zero = |s: &Series<T>| s.coeffs.is_empty() && s.prec.is_none();
        if exact_zero(self) || exact_zero(rhs) {
            return Series::zero();
        }
        // The product is known up to the first place where either factor's error term bites.
        let lead = |s: &Series<T>| s.valuation().unwrap_or(s.start);
        let prec = min_prec(
            self.prec.map(|p| p + lead(rhs)),
            rhs.prec.map(|p| p + lead(self)),
        );
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            let p = prec.unwrap_or(0);
            return Series::from_raw(p, Vec::new(), prec);
        }
        let start = self.start + rhs.start;
        let full = self.coeffs.len() + rhs.coeffs.len() - 1;
        let len = match prec {
            Some(p) => ((p - start).max(0) as usize).min(full),
            None => full,
        };
        let mut c = vec![T::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= len {
                break;
            }
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                let mut t = a.clone();
                t *= b;
                c[i + j] += t;
            }
        }
        Series::from_raw(start, c, prec)
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for Series<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms()
            .map(|(k, c)| match k {
                0 => format!("({c})"),
                1 => format!("({c})*t"),
                _ => format!("({c})*t^{k}"),
            })
            .collect();
        let body = if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        };
        match self.prec {
            Some(p) => write!(f, "{body} + O(t^{p})"),
            None => write!(f, "{body}"),
        }
    }
}

/// Expansion of a bivariate quotient: a power series in the holomorphic
/// variable whose coefficients are Laurent series in the other variable.
#[derive(Clone, Debug, PartialEq)]
pub struct BiSeries<T> {
    holo: Var,
    low: i64,
    holo_max: i64,
    other_max: i64,
    slices: BTreeMap<i64, Series<T>>,
}

impl<T: Scalar> BiSeries<T> {
    /// Coefficient of `u^i v^j` in the original variable order.
    pub fn coeff(&self, i: i64, j: i64) -> Result<T> {
        let (h, o) = match self.holo {
            Var::First => (i, j),
            Var::Second => (j, i),
        };
        if h > self.holo_max || o > self.other_max {
            return Err(Error::InternalConsistency(format!(
                "coefficient ({i}, {j}) lies outside the expanded window"
            )));
        }
        match self.slices.get(&h) {
            Some(s) => s.coeff(o),
            None => Ok(T::zero()),
        }
    }

    /// Lowest power of the holomorphic variable that can occur.
    pub fn holo_low(&self) -> i64 {
        self.low
    }

    /// Slice at `holo^h`, as a series in the other variable.
    pub fn slice(&self, h: i64) -> Option<&Series<T>> {
        self.slices.get(&h)
    }

    /// Product with a Laurent polynomial, on a window that the known terms determine.
    pub fn mul_laurent(&self, p: &LaurentPoly2<T>, holo_max: i64, other_max: i64) -> Result<Self> {
        let ps = p.slices(self.holo);
        let mut slices = BTreeMap::new();
        let Some((&j0, _)) = ps.iter().next() else {
            return Ok(BiSeries {
                holo: self.holo,
                low: self.low,
                holo_max,
                other_max,
                slices,
            });
        };
        let low = self.low + j0;
        for t in low..=holo_max {
            let mut acc = Series::zero();
            for (&j, pj) in ps.range(..=t - self.low) {
                if t - j > self.holo_max {
                    return Err(Error::InternalConsistency(
                        "series product needs terms beyond the expanded window".into(),
                    ));
                }
                if let Some(sl) = self.slices.get(&(t - j)) {
                    acc = &acc + &(pj * sl);
                }
            }
            if acc.prec().is_some_and(|q| q <= other_max) {
                return Err(Error::InternalConsistency(
                    "series product lost precision below the requested window".into(),
                ));
            }
            slices.insert(t, acc.truncate(other_max + 1));
        }
        Ok(BiSeries {
            holo: self.holo,
            low,
            holo_max,
            other_max,
            slices,
        })
    }
}

/// Expands `num/den` as a series in `holo` up to `holo^holo_max`, each
/// coefficient being a Laurent series around zero in the other variable known
/// through exponent `other_max`. `margin` extra terms are carried internally.
pub fn expand_quotient<T: Scalar>(
    num: &LaurentPoly2<T>,
    den: &LaurentPoly2<T>,
    holo: Var,
    holo_max: i64,
    other_max: i64,
    margin: usize,
) -> Result<BiSeries<T>> {
    let d = den.slices(holo);
    let (&k0, _) = d
        .iter()
        .next()
        .ok_or_else(|| Error::InvalidInput("quotient by the zero polynomial".into()))?;
    let n = num.slices(holo);
    let j0 = n.keys().next().copied().unwrap_or(k0);
    let low = j0 - k0;
    let nmax = (holo_max - low).max(-1);
    let d0 = &d[&k0];
    let v0 = d0.valuation().unwrap_or(0);
    let mut rel = (other_max + v0).max(0) as usize + margin + 4;

    for _ in 0..16 {
        let c0 = d0.inverse(rel)?;
        let mut c: Vec<Series<T>> = Vec::with_capacity((nmax + 1).max(0) as usize);
        for m in 0..=nmax {
            if m == 0 {
                c.push(c0.clone());
                continue;
            }
            let mut s = Series::zero();
            for (&k, dk) in d.range(k0 + 1..=k0 + m) {
                s = &s + &(dk * &c[(m - (k - k0)) as usize]);
            }
            c.push(-&(&c0 * &s));
        }
        let mut slices = BTreeMap::new();
        let mut ok = true;
        for t in low..=holo_max {
            let mut acc = Series::zero();
            for (&j, nj) in n.range(j0..=t + k0) {
                let idx = t + k0 - j;
                acc = &acc + &(nj * &c[idx as usize]);
            }
            if acc.prec().is_some_and(|p| p <= other_max) {
                ok = false;
                break;
            }
            slices.insert(t, acc.truncate(other_max + 1));
        }
        if ok {
            return Ok(BiSeries {
                holo,
                low,
                holo_max,
                other_max,
                slices,
            });
        }
        rel *= 2;
    }
    Err(Error::InternalConsistency(
        "series expansion did not reach the requested precision".into(),
    ))
}
