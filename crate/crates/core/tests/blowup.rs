use nqh_core::blowup::{
    divisor_restriction, first_blowup_strict_transform, hamiltonian_field, pullback_function,
    pullback_vector_field, pulled_normal_form, strict_transform_factorization, theta_zero,
    theta_zero_exponents, theta_zero_with, transition_consistency, Chart, MonomialMap,
    VectorFieldExpr,
};
use nqh_core::normal_form::{build_normal_form, sample_generic_parameters, ParameterPoint, PlanePoly};
use nqh_core::poly_core::{Var, Vars};
use nqh_core::scalar::{int, rat};
use nqh_core::{QLaurent, QPoly, Rational, Scalar};
use proptest::prelude::*;

fn eval(f: &QLaurent, x: &Rational, y: &Rational) -> Rational {
    f.terms()
        .fold(int(0), |acc, (&(i, j), c)| acc + c * x.pow_i(i) * y.pow_i(j))
}

fn linear(c0: &Rational, c1: &Rational) -> QPoly {
    QPoly::linear(c0.clone(), c1.clone())
}

/// `y₃(y₃+1) ∏ a_{1,j} ∏ (y₃ + b_{1,j})`
fn expected_p(p: &ParameterPoint) -> QPoly {
    let mut acc = &QPoly::x() * &linear(&int(1), &int(1));
    acc = acc.scale(&p.prod_a1());
    for b in p.b1() {
        acc = &acc * &linear(&b, &int(1));
    }
    acc
}

/// `x₂ ∏ (1 + a_{1,j} x₂)`
fn expected_j(p: &ParameterPoint) -> QPoly {
    p.a1()
        .iter()
        .fold(QPoly::x(), |acc, a| &acc * &linear(&int(1), a))
}

fn point() -> impl Strategy<Value = ParameterPoint> {
    (2usize..=6, 2usize..=6, any::<u64>())
        .prop_map(|(m, n, s)| sample_generic_parameters(m, n, s).unwrap())
}

#[test]
fn three_three_pullbacks() {
    let p = sample_generic_parameters(3, 3, 1).unwrap();
    let f4 = strict_transform_factorization(&p, Chart::V4).unwrap();
    assert_eq!((f4.exc_x, f4.exc_y), (6, 9));
    assert_ne!(f4.rest.coeff(0, 0), int(0));
    let f3 = strict_transform_factorization(&p, Chart::V3).unwrap();
    assert_eq!(f3.exc_x, 9);
    assert_eq!(divisor_restriction(&f3).unwrap(), expected_p(&p));
    let f2 = strict_transform_factorization(&p, Chart::V2).unwrap();
    assert_eq!(f2.exc_y, 6);
    assert_eq!(divisor_restriction(&f2).unwrap(), expected_j(&p));
    assert!(divisor_restriction(&f4).is_err());
}

#[test]
fn first_blowup_matches_v1_pullback() {
    for (m, n) in [(2, 2), (3, 3), (4, 5)] {
        let p = sample_generic_parameters(m, n, 6).unwrap();
        let f1 = strict_transform_factorization(&p, Chart::V1).unwrap();
        // the displayed transform keeps the x₁ coming from the xy factor
        assert_eq!(f1.exc_x, (m + n) as i64);
        assert_eq!(f1.rest.shift(1, 0), first_blowup_strict_transform(&p));
    }
}

#[test]
fn field_pullback_examples() {
    let xy = |c, i, j| QLaurent::monomial(Vars::XY, int(c), i, j);
    let v4 = |c, i, j| QLaurent::monomial(Chart::V4.vars(), int(c), i, j);
    let radial = VectorFieldExpr::new(xy(1, 1, 0), xy(1, 0, 1)).unwrap();
    let r = pullback_vector_field(&radial, Chart::V4).unwrap();
    assert_eq!((r.cx, r.cy), (v4(1, 1, 0), QLaurent::zero(Chart::V4.vars())));
    let dy = VectorFieldExpr::new(QLaurent::zero(Vars::XY), xy(1, 0, 0)).unwrap();
    let r = pullback_vector_field(&dy, Chart::V4).unwrap();
    assert_eq!((&r.cx, &r.cy), (&v4(-1, 0, -2), &v4(1, -1, -1)));
    assert!(pullback_vector_field(&r, Chart::V3).is_err());
}

#[test]
fn chart_parsing() {
    assert_eq!(Chart::parse("V3").unwrap(), Chart::V3);
    assert_eq!(Chart::parse("v2").unwrap(), Chart::V2);
    assert!(Chart::parse("v5").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn exceptional_exponents_and_restrictions(p in point()) {
        let (m, n) = (p.m() as i64, p.n() as i64);
        let f4 = strict_transform_factorization(&p, Chart::V4).unwrap();
        prop_assert_eq!((f4.exc_x, f4.exc_y), (m + n, 2 * m + n));
        let on_y = f4.rest.restrict_zero(Var::Second).unwrap();
        let want_y = p.b1().iter().fold(
            linear(&int(1), &int(1)).scale(&p.prod_a1()),
            |acc, b| &acc * &linear(&int(1), b),
        );
        prop_assert_eq!(on_y, want_y);
        let on_x = f4.rest.restrict_zero(Var::First).unwrap();
        let want_x = p.a1().iter().fold(QPoly::one(), |acc, a| &acc * &linear(a, &int(1)));
        prop_assert_eq!(on_x, want_x);

        let f3 = strict_transform_factorization(&p, Chart::V3).unwrap();
        prop_assert_eq!(f3.exc_x, 2 * m + n);
        prop_assert_eq!(divisor_restriction(&f3).unwrap(), expected_p(&p));
        let f2 = strict_transform_factorization(&p, Chart::V2).unwrap();
        prop_assert_eq!(f2.exc_y, m + n);
        prop_assert_eq!(divisor_restriction(&f2).unwrap(), expected_j(&p));
    }

    #[test]
    fn pullback_is_composition(p in point(), u in -4i64..=4, v in 1i64..=4) {
        let f = build_normal_form(&p);
        let (u, v) = (rat(u, 3), rat(v, 5));
        for chart in Chart::ALL {
            let map = chart.map();
            let pulled = pullback_function(&f, chart).unwrap();
            let x = map.image_first.coeff.clone() * u.pow_i(map.image_first.exp.0) * v.pow_i(map.image_first.exp.1);
            let y = map.image_second.coeff.clone() * u.pow_i(map.image_second.exp.0) * v.pow_i(map.image_second.exp.1);
            prop_assert_eq!(eval(&pulled, &u, &v), eval(f.as_laurent(), &x, &y));
            prop_assert_eq!(&pulled, &pulled_normal_form(&p, chart).unwrap());
        }
        prop_assert!(transition_consistency(&p).unwrap());
    }

    #[test]
    fn field_pullback_is_chain_rule(p in point(), g in prop::collection::vec(((0i64..=3, 0i64..=3), -4i64..=4), 1..5)) {
        // X̃(g∘φ) = (X g)∘φ for the Hamiltonian field and a test function g
        let theta = hamiltonian_field(build_normal_form(&p).as_laurent());
        let g = QLaurent::from_terms(Vars::XY, g.into_iter().map(|(e, c)| (e, int(c))));
        let gp = PlanePoly::new(g.clone()).unwrap();
        for chart in [Chart::V2, Chart::V3, Chart::V4] {
            let tilde = pullback_vector_field(&theta, chart).unwrap();
            let lhs = tilde.apply(&pullback_function(&gp, chart).unwrap());
            let rhs = pullback_function(&PlanePoly::new(theta.apply(&g)).unwrap(), chart).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn theta_zero_is_a_saturated_polynomial_field(p in point()) {
        let t = theta_zero(&p).unwrap();
        prop_assert!(t.cx.is_polynomial() && t.cy.is_polynomial());
        let (ex, ey) = theta_zero_exponents(p.m(), p.n());
        prop_assert!(theta_zero_with(&p, ex + 1, ey).is_err());
        prop_assert!(theta_zero_with(&p, ex, ey + 1).is_err());
    }
}

#[test]
fn transition_maps_invert() {
    for t in [MonomialMap::v4_to_v3(), MonomialMap::v4_to_v2()] {
        let inv = t.inverse().unwrap();
        assert_eq!(inv.inverse().unwrap(), t);
        let id = inv.after(&t).unwrap();
        assert_eq!(id.image_first.exp, (1, 0));
        assert_eq!(id.image_second.exp, (0, 1));
    }
}
