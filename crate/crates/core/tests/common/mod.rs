//! Closed forms evaluated from first principles, independent of the library's
//! own oracle module: the Bézout cofactors are recomputed here from the
//! divisor restrictions written out by hand.
#![allow(dead_code)]

use nqh_core::normal_form::ParameterPoint;
use nqh_core::scalar::int;
use nqh_core::{QPoly, Rational, Scalar};

pub fn linear(c0: Rational, c1: Rational) -> QPoly {
    QPoly::linear(c0, c1)
}

/// `W` in `1 = W·T + Z·S`, reduced modulo `S`.
pub fn cofactor(t: &QPoly, s: &QPoly) -> QPoly {
    let (g, w, _) = t.extended_gcd(s).unwrap();
    assert_eq!(g, QPoly::one());
    w.rem(s).unwrap()
}

/// `t^d f(1/t)` evaluated at `t`.
pub fn reversed_eval(f: &QPoly, d: usize, t: &Rational) -> Rational {
    f.coeffs()
        .iter()
        .enumerate()
        .fold(int(0), |acc, (e, c)| acc + c * t.pow_i((d - e) as i64))
}

pub fn sign(e: i64) -> Rational {
    int(if e.rem_euclid(2) == 0 { 1 } else { -1 })
}

/// `∏_{s<t} (x_t − x_s)`
pub fn vandermonde(xs: &[Rational]) -> Rational {
    let mut d = int(1);
    for t in 0..xs.len() {
        for s in 0..t {
            d *= &xs[t] - &xs[s];
        }
    }
    d
}

/// `y(y+1) ∏ a ∏ (y + b)`, the restriction to `x₃ = 0`.
pub fn expected_p(p: &ParameterPoint) -> QPoly {
    let mut acc = (&QPoly::x() * &linear(int(1), int(1))).scale(&p.prod_a1());
    for b in p.b1() {
        acc = &acc * &linear(b, int(1));
    }
    acc
}

/// `x ∏ (1 + a x)`, the restriction to `y₂ = 0`.
pub fn expected_j(p: &ParameterPoint) -> QPoly {
    p.a1()
        .into_iter()
        .fold(QPoly::x(), |acc, a| &acc * &linear(int(1), a))
}

pub struct Oracle {
    pub m: i64,
    pub n: i64,
    pub a: Vec<Rational>,
    pub b: Vec<Rational>,
    pub prod_a: Rational,
    /// `K` with `K·J′ + L·J = 1`.
    pub k: QPoly,
    /// `U` with `U·P′ + V·P = ∏a`.
    pub u: QPoly,
    pub b_at_zero: Rational,
}

impl Oracle {
    pub fn new(p: &ParameterPoint) -> Self {
        let a = p.a1();
        let prod_a = a.iter().fold(int(1), |acc, x| acc * x);
        let j = expected_j(p);
        let pp = expected_p(p);
        let aa = a
            .iter()
            .fold(QPoly::one(), |acc, ai| &acc * &linear(ai.clone(), int(1)));
        // y^e·A has gcd y^{e−1} with its derivative; divide the identity through by it
        let e = int(2 * p.m() as i64 + p.n() as i64);
        let t = &aa.scale(&e) + &(&QPoly::x() * &aa.derivative());
        let bp = cofactor(&t, &(&QPoly::x() * &aa));
        Oracle {
            m: p.m() as i64,
            n: p.n() as i64,
            k: cofactor(&j.derivative(), &j),
            u: cofactor(&pp.derivative(), &pp).scale(&prod_a),
            b_at_zero: bp.eval(&int(0)),
            a,
            b: p.b1(),
            prod_a,
        }
    }

    pub fn k_tilde(&self, t: &Rational) -> Rational {
        reversed_eval(&self.k, self.n as usize - 1, t)
    }

    pub fn u_tilde(&self, t: &Rational) -> Rational {
        reversed_eval(&self.u, self.m as usize - 1, t)
    }

    /// `K̃(−a_i) = (−1)^N a_i^{N−1} / ∏_{j≠i}(1 − a_j/a_i)` (0-based `i`).
    pub fn k_tilde_product(&self, i: usize) -> Rational {
        let ai = &self.a[i];
        let den = self
            .a
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .fold(int(1), |acc, (_, aj)| acc * (int(1) - aj / ai));
        sign(self.n) * ai.pow_i(self.n - 1) / den
    }

    pub fn b0_product(&self) -> Rational {
        int(1) / (int(2 * self.m + self.n) * &self.prod_a)
    }

    /// M₁ at row `j` (1-based; `j = N−1` is the constant row) and column `a_{1,i}` (0-based).
    pub fn m1(&self, j: i64, i: usize) -> Rational {
        let ai = &self.a[i];
        let mn = int(self.m + self.n);
        if j < self.n - 1 {
            sign(self.n + j) * self.k_tilde(&-ai) / (mn * ai.pow_i(self.n + j))
        } else {
            (-(self.k_tilde(&-ai) / ai.pow_i(2 * self.n - 1)) - &self.b_at_zero / ai) / mn
        }
    }

    /// M₄ at row `j` and column `b_{1,i}`, both 1-based.
    pub fn m4(&self, j: i64, i: usize) -> Rational {
        let bi = &self.b[i - 1];
        sign(j + 1) * bi.pow_i(2 * self.m - j - 3) * self.u_tilde(&-bi.recip())
            / (int(2 * self.m + self.n) * &self.prod_a)
    }

    pub fn det_m1(&self) -> Rational {
        let (m, n) = (self.m, self.n);
        let mut d = sign(n * n - 1) / int(m + n).pow_i(n - 1) * int(2 * m + 2 * n - 1)
            / int(2 * m + n);
        for ai in &self.a {
            d *= self.k_tilde(&-ai) / ai.pow_i(n + 1);
        }
        let inv: Vec<Rational> = self.a.iter().map(|a| a.recip()).collect();
        d * sign(inv.len() as i64 * (inv.len() as i64 - 1) / 2) * vandermonde(&inv)
    }

    /// Determinant of the a-block at level `2 ≤ k ≤ N−1`.
    pub fn det_m1k(&self, k: usize) -> Rational {
        let mn = int(self.m + self.n);
        let mut d = int(1);
        let mut nodes = Vec::new();
        for (pos, c) in (k..self.n as usize).enumerate() {
            let ac = &self.a[c - 1];
            d *= sign(self.n + pos as i64 + 1) * self.k_tilde(&-ac)
                / (&mn * ac.pow_i(self.n + 1));
            nodes.push(ac.recip());
        }
        d * vandermonde(&nodes)
    }

    /// Determinant of M₄ on the consecutive indices `idx` (1-based).
    pub fn det_m4(&self, idx: &[usize]) -> Rational {
        let lo = idx[0] as i64;
        let mut d = int(1);
        let mut nodes = Vec::new();
        for &i in idx {
            let bi = &self.b[i - 1];
            d *= sign(i as i64 + 1) * bi.pow_i(2 * self.m - 3 - lo) * self.u_tilde(&-bi.recip())
                / (int(2 * self.m + self.n) * &self.prod_a);
            nodes.push(bi.recip());
        }
        d * vandermonde(&nodes)
    }
}
