//! Randomized invariants of the expression canonicalizer and the gradient
//! operator.

use proptest::prelude::*;

use weyl_lab::expr::{diff, parse_expr, Expr, Fields};
use weyl_lab::tensor::Chart;
use weyl_lab::weyl::{gradient, is_integrable};

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-4i64..=4).prop_map(Expr::integer),
        Just(Expr::symbol("x")),
        Just(Expr::symbol("y")),
        Just(parse_expr("sin(x)").unwrap()),
        Just(parse_expr("cos(y)").unwrap()),
        Just(parse_expr("exp(x)").unwrap()),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(3, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.add(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.mul(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.sub(&b)),
            inner.clone().prop_map(|a| a.neg()),
            (inner, 1u32..=3).prop_map(|(a, k)| a.powi(k as i64)),
        ]
    })
}

fn no_fields() -> Fields {
    Fields::empty()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn add_then_subtract_cancels(a in expr(), b in expr()) {
        prop_assert!(a.add(&b).sub(&b).sub(&a).is_zero());
    }

    #[test]
    fn self_difference_is_zero(a in expr()) {
        prop_assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn diff_is_linear(a in expr(), b in expr()) {
        let f = no_fields();
        let lhs = diff(&a.add(&b), "x", &f);
        let rhs = diff(&a, "x", &f).add(&diff(&b, "x", &f));
        prop_assert!(lhs.sub(&rhs).is_zero());
    }

    #[test]
    fn diff_product_rule(a in expr(), b in expr()) {
        let f = no_fields();
        let lhs = diff(&a.mul(&b), "x", &f);
        let rhs = diff(&a, "x", &f).mul(&b).add(&a.mul(&diff(&b, "x", &f)));
        prop_assert!(lhs.sub(&rhs).is_zero());
    }

    #[test]
    fn gradients_are_integrable(phi in expr()) {
        let chart = Chart::new(vec!["x".into(), "y".into()], Fields::empty()).unwrap();
        prop_assert!(is_integrable(&gradient(&chart, &phi)));
    }

    #[test]
    fn mixed_partials_commute(a in expr()) {
        let f = no_fields();
        let xy = diff(&diff(&a, "x", &f), "y", &f);
        let yx = diff(&diff(&a, "y", &f), "x", &f);
        prop_assert!(xy.sub(&yx).is_zero());
    }
}
