use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::series::Series;
use super::unipoly::UniPoly;

/// Univariate rational function kept in lowest terms with a monic denominator.
#[derive(Clone, PartialEq, Debug)]
pub struct RationalFunction1<T> {
    num: UniPoly<T>,
    den: UniPoly<T>,
}

impl<T: Scalar> RationalFunction1<T> {
    pub fn new(num: UniPoly<T>, den: UniPoly<T>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        if num.is_zero() {
            return Ok(Self::from_poly(UniPoly::zero()));
        }
        let g = num.gcd(&den)?;
        let mut n = num.div_exact(&g)?;
        let mut d = den.div_exact(&g)?;
        let lc = d.leading().expect("nonzero denominator").clone();
        let inv = T::one() / lc;
        n = n.scale(&inv);
        d = d.scale(&inv);
        Ok(RationalFunction1 { num: n, den: d })
    }

    pub fn from_poly(p: UniPoly<T>) -> Self {
        RationalFunction1 {
            num: p,
            den: UniPoly::one(),
        }
    }

    pub fn numerator(&self) -> &UniPoly<T> {
        &self.num
    }

    pub fn denominator(&self) -> &UniPoly<T> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn eval(&self, t: &T) -> Result<T> {
        let d = self.den.eval(t);
        if d.is_zero() {
            return Err(Error::InvalidInput("evaluation at a pole".into()));
        }
        Ok(self.num.eval(t) / d)
    }

    pub fn inv(&self) -> Result<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    /// Laurent expansion around zero, returning the coefficients of `t^lo..=t^hi`.
    pub fn laurent_expand(&self, lo: i64, hi: i64) -> Result<Vec<T>> {
        let s = self.laurent_series(hi + 1)?;
        (lo..=hi).map(|k| s.coeff(k)).collect()
    }

    /// Laurent series around zero known below `t^prec`.
    pub fn laurent_series(&self, prec: i64) -> Result<Series<T>> {
        if self.is_zero() {
            return Ok(Series::zero());
        }
        let n = Series::from_unipoly(&self.num);
        let d = Series::from_unipoly(&self.den);
        let v = d.valuation().unwrap_or(0);
        let nv = n.valuation().unwrap_or(0);
        let rel = (prec + v - nv).max(0) as usize;
        let inv = d.inverse(rel.max(1))?;
        Ok((&n * &inv).truncate(prec))
    }
}

impl<T: Scalar> Add for &RationalFunction1<T> {
    type Output = RationalFunction1<T>;
    fn add(self, rhs: &RationalFunction1<T>) -> RationalFunction1<T> {
        let n = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        RationalFunction1::new(n, &self.den * &rhs.den).expect("nonzero denominators")
    }
}

impl<T: Scalar> Neg for &RationalFunction1<T> {
    type Output = RationalFunction1<T>;
    fn neg(self) -> RationalFunction1<T> {
        RationalFunction1 {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl<T: Scalar> Sub for &RationalFunction1<T> {
    type Output = RationalFunction1<T>;
    fn sub(self, rhs: &RationalFunction1<T>) -> RationalFunction1<T> {
        self + &(-rhs)
    }
}

impl<T: Scalar> Mul for &RationalFunction1<T> {
    type Output = RationalFunction1<T>;
    fn mul(self, rhs: &RationalFunction1<T>) -> RationalFunction1<T> {
        RationalFunction1::new(&self.num * &rhs.num, &self.den * &rhs.den)
            .expect("nonzero denominators")
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for RationalFunction1<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::scalar::{int, rat};
    use crate::{QPoly, QRatFunc};

    #[test]
    fn reduces_to_lowest_terms() {
        // (x^2 - 1) / (2x - 2) = (x + 1)/2
        let r = QRatFunc::new(QPoly::from_ints(&[-1, 0, 1]), QPoly::from_ints(&[-2, 2])).unwrap();
        assert!(r.is_polynomial());
        assert_eq!(r.numerator(), &QPoly::from_coeffs(vec![rat(1, 2), rat(1, 2)]));
    }

    #[test]
    fn expansion_of_simple_pole() {
        // 1/(t (1 + 3t)) = t^-1 - 3 + 9t - 27t^2
        let r = QRatFunc::new(QPoly::one(), QPoly::from_ints(&[0, 1, 3])).unwrap();
        let c = r.laurent_expand(-2, 2).unwrap();
        assert_eq!(c, vec![int(0), int(1), int(-3), int(9), int(-27)]);
    }

    #[test]
    fn zero_denominator_is_rejected() {
        assert!(QRatFunc::new(QPoly::one(), QPoly::zero()).is_err());
    }
}
