mod common;

use proptest::prelude::*;
use tcurv_core::analysis::operator_derivation;
use tcurv_core::expr::parse;
use tcurv_core::tensor::{DenseTensor, MetricValue, Variance};
use tcurv_core::tfamily::{t_from_geometry, TCoeffs};

/// Expression source over `x1..x3` whose values stay finite on `[-1,1]^3`.
fn expr_source() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        (1usize..=3).prop_map(|i| format!("x{i}")),
        (1i64..6).prop_map(|c| c.to_string()),
        (-20i32..20).prop_map(|c| format!("{}", c as f64 / 8.0)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) + ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) - ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) * ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) / (2 + ({b})^2)")),
            (inner.clone(), 1i32..4).prop_map(|(a, e)| format!("({a})^{e}")),
            inner.clone().prop_map(|a| format!("sin({a})")),
            inner.clone().prop_map(|a| format!("cos({a})")),
            inner.clone().prop_map(|a| format!("exp(sin({a}))")),
            inner.clone().prop_map(|a| format!("sqrt(1 + ({a})^2)")),
            inner.prop_map(|a| format!("log(2 + sin({a}))")),
        ]
    })
}

fn point() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1.0f64..1.0, 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn derivative_matches_finite_difference(src in expr_source(), p in point(), var in 0usize..3) {
        let e = parse(&src, 3).unwrap();
        let d = e.differentiate(var).evaluate(&p).unwrap();
        let h = 1e-5;
        let (mut lo, mut hi) = (p.clone(), p.clone());
        lo[var] -= h;
        hi[var] += h;
        let fd = (e.evaluate(&hi).unwrap() - e.evaluate(&lo).unwrap()) / (2.0 * h);
        prop_assert!((d - fd).abs() <= 1e-6 * (1.0 + d.abs()), "{src}: {d} vs {fd}");
    }

    #[test]
    fn print_parse_round_trip(src in expr_source()) {
        let e = parse(&src, 3).unwrap();
        let printed = e.to_string();
        let back = parse(&printed, 3).unwrap();
        prop_assert_eq!(&back, &e);
        prop_assert_eq!(back.to_string(), printed);
    }
}

fn coeffs() -> impl Strategy<Value = TCoeffs> {
    proptest::array::uniform8((-6i64..=6, 1i64..=6)).prop_map(|a| TCoeffs(a.map(|(p, q)| num_rational::Rational64::new(p, q))))
}

fn metric3() -> impl Strategy<Value = MetricValue> {
    (proptest::collection::vec(-0.4f64..0.4, 6), prop::bool::ANY).prop_map(|(v, lorentz)| {
        let s = if lorentz { -1.0 } else { 1.0 };
        let g = nalgebra::DMatrix::from_row_slice(3, 3, &[s * 2.0 + v[0], v[1], v[2], v[1], 2.0 + v[3], v[4], v[2], v[4], 2.0 + v[5]]);
        MetricValue::new(g).unwrap()
    })
}

fn tensor(rank: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1.0f64..1.0, 3usize.pow(rank as u32))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn t_is_linear_in_coefficients(a in coeffs(), b in coeffs(), x in -3i64..3, y in -3i64..3) {
        let (_, geos) = common::fixture("sasakianR3", 3, 1, 77);
        let geo = &geos[0];
        let mix = TCoeffs(std::array::from_fn(|i| a.0[i] * x + b.0[i] * y));
        let lhs = t_from_geometry(geo, &mix);
        let rhs = t_from_geometry(geo, &a).scale(x as f64).add(&t_from_geometry(geo, &b).scale(y as f64)).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn contraction_is_symmetric_in_slots(m in metric3(), data in tensor(3), i in 0usize..3, j in 0usize..3) {
        prop_assume!(i != j);
        let t = DenseTensor::from_data(3, vec![Variance::Covariant; 3], data).unwrap();
        let a = t.contract(i, j, &m).unwrap();
        let b = t.contract(j, i, &m).unwrap();
        prop_assert_eq!(&a, &b);
        // raising one slot and taking the plain trace gives the same result
        let raised = t.raise(i, &m).unwrap().contract(i, j, &m).unwrap();
        prop_assert!(raised.sub(&a).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn raise_then_lower_is_identity(m in metric3(), data in tensor(2), slot in 0usize..2) {
        let t = DenseTensor::from_data(3, vec![Variance::Covariant; 2], data).unwrap();
        let back = t.raise(slot, &m).unwrap().lower(slot, &m).unwrap();
        prop_assert!(back.sub(&t).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn derivation_obeys_leibniz(op in tensor(2), u in tensor(1), v in tensor(1)) {
        let u = DenseTensor::from_data(3, vec![Variance::Covariant], u).unwrap();
        let v = DenseTensor::from_data(3, vec![Variance::Covariant], v).unwrap();
        let lhs = operator_derivation(&op, &u.tensor_product(&v));
        let rhs = operator_derivation(&op, &u)
            .tensor_product(&v)
            .add(&u.tensor_product(&operator_derivation(&op, &v)))
            .unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn skew_operator_annihilates_metric(m in metric3(), w in tensor(2)) {
        // op = g^{-1} w_skew is g-skew
        let n = 3;
        let skew: Vec<f64> = (0..n * n).map(|k| (w[k] - w[(k % n) * n + k / n]) / 2.0).collect();
        let op: Vec<f64> = (0..n * n)
            .map(|k| (0..n).map(|e| m.g_inv[(k / n, e)] * skew[e * n + k % n]).sum())
            .collect();
        let g = m.as_tensor();
        prop_assert!(operator_derivation(&op, &g).max_abs() < 1e-12);
    }
}
