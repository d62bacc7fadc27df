use proptest::prelude::*;
use sl3t::legendre::{bernstein_envelope, holder_bound, holder_defect, legendre_eval, LegendreTable};
use sl3t::spectral::{op_norm_diff, schatten_norm_diff, Exponent, SpectralOperator};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn holder_bound_holds(n in 0usize..3000, delta in -1.0f64..=1.0) {
        prop_assert!(holder_defect(n, delta).unwrap() <= holder_bound(delta));
    }

    #[test]
    fn legendre_is_bounded_by_one(n in 0usize..2000, x in -1.0f64..=1.0) {
        prop_assert!(legendre_eval(n, x).unwrap().abs() <= 1.0 + 1e-15);
    }

    #[test]
    fn parity(n in 0usize..500, x in -1.0f64..=1.0) {
        let s = if n % 2 == 0 { 1.0 } else { -1.0 };
        let (a, b) = (legendre_eval(n, x).unwrap(), legendre_eval(n, -x).unwrap());
        prop_assert!((a - s * b).abs() <= 1e-14);
    }

    #[test]
    fn table_agrees_with_single_evaluation(n in 0usize..400, x in -1.0f64..=1.0) {
        let t = LegendreTable::new(400, x).unwrap();
        prop_assert_eq!(t.get(n), legendre_eval(n, x).unwrap());
    }

    #[test]
    fn bernstein_envelope_dominates(n in 1usize..2000, theta in 0.01f64..(std::f64::consts::PI - 0.01)) {
        let v = legendre_eval(n, theta.cos()).unwrap().abs();
        prop_assert!(v <= bernstein_envelope(n, theta) * (1.0 + 1e-12));
    }

    #[test]
    fn averaging_operator_is_a_contraction(delta in -1.0f64..=1.0, n in 0usize..200) {
        let t = SpectralOperator::new(delta, 200).unwrap();
        prop_assert_eq!(t.eigenvalue(0), 1.0);
        prop_assert!(t.eigenvalue(n).abs() <= 1.0 + 1e-15);
        prop_assert_eq!(SpectralOperator::multiplicity(n), 2 * n + 1);
    }

    #[test]
    fn certified_op_norm_dominates_head(delta in -0.99f64..0.99) {
        let r = op_norm_diff(delta, 256).unwrap();
        prop_assert!(r.certified() >= r.value());
        prop_assert!(r.value() <= holder_bound(delta) + 1e-15);
    }

    #[test]
    fn schatten_norms_decrease_in_p(delta in 0.01f64..0.5, p in 4.5f64..12.0) {
        let a = schatten_norm_diff(delta, Exponent::Finite(p), 128).unwrap();
        let b = schatten_norm_diff(delta, Exponent::Finite(p + 1.0), 128).unwrap();
        let inf = schatten_norm_diff(delta, Exponent::Infinity, 128).unwrap();
        prop_assert!(b <= a * (1.0 + 1e-12));
        prop_assert!(inf <= b * (1.0 + 1e-12));
    }
}
