use serde::Serialize;

use crate::error::{Error, Result};
use crate::QPoly;

/// Bézout data of a polynomial and its derivative: `G = W·Q′ + Z·Q`, `Q = G·S`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BezoutData {
    #[serde(serialize_with = "ser_poly")]
    pub q: QPoly,
    #[serde(serialize_with = "ser_poly")]
    pub g: QPoly,
    #[serde(serialize_with = "ser_poly")]
    pub s: QPoly,
    #[serde(serialize_with = "ser_poly")]
    pub w: QPoly,
    #[serde(serialize_with = "ser_poly")]
    pub z: QPoly,
}

fn ser_poly<S: serde::Serializer>(p: &QPoly, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(p.coeffs().len()))?;
    for c in p.coeffs() {
        seq.serialize_element(&crate::scalar::format_rational(c))?;
    }
    seq.end()
}

/// Canonical cofactors with `deg W < deg S` and `G = gcd(Q, Q′)` monic.
pub fn bezout_cofactors(q: &QPoly) -> Result<BezoutData> {
    if q.degree().is_none_or(|d| d < 1) {
        return Err(Error::InvalidInput(
            "Bézout cofactors need a non-constant polynomial".into(),
        ));
    }
    let dq = q.derivative();
    let g = q.gcd(&dq)?;
    let s = q.div_exact(&g)?;
    let t = dq.div_exact(&g)?;
    // 1 = w·T + z·S, then reduce w modulo S.
    let (one, w0, _) = t.extended_gcd(&s)?;
    if !one.is_constant() {
        return Err(Error::InternalConsistency(
            "Q′/G and Q/G are not coprime".into(),
        ));
    }
    let w = w0.rem(&s)?;
    let z = (&QPoly::one() - &(&w * &t)).div_exact(&s)?;
    let data = BezoutData {
        q: q.clone(),
        g,
        s,
        w,
        z,
    };
    data.check()?;
    Ok(data)
}

impl BezoutData {
    /// Re-verifies the defining identities.
    pub fn check(&self) -> Result<()> {
        let lhs = &(&self.w * &self.q.derivative()) + &(&self.z * &self.q);
        if lhs != self.g {
            return Err(Error::InternalConsistency(
                "Bézout identity G = W·Q′ + Z·Q fails".into(),
            ));
        }
        if &self.g * &self.s != self.q {
            return Err(Error::InternalConsistency("Q ≠ G·S".into()));
        }
        let ok = match (self.w.degree(), self.s.degree()) {
            (None, _) => true,
            (Some(dw), Some(ds)) => dw < ds,
            (Some(_), None) => false,
        };
        if !ok {
            return Err(Error::InternalConsistency("deg W ≥ deg S".into()));
        }
        Ok(())
    }
}
