use proptest::prelude::*;
use sl3t::repsim::{group_law_defect, quasi_regular_apply};
use sl3t::sl3::{rotation_xy, rotation_yz, LambdaPoint, Mat3};
use sl3t::sphere::BandLimitedFunction;

fn group_element() -> impl Strategy<Value = Mat3> {
    (0.0f64..6.3, 0.0f64..6.3, 0.0f64..0.6, 0.0f64..1.0).prop_map(|(t1, t2, a1, s)| {
        let a2 = a1 * (1.5 * s - 0.5);
        rotation_xy(t1) * LambdaPoint::new(a1, a2, -a1 - a2).unwrap().exp_diag() * rotation_yz(t2)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn rotations_act_isometrically(t1 in 0.0f64..6.3, t2 in 0.0f64..6.3, coeffs in prop::collection::vec(-1.0f64..1.0, 25)) {
        let f = BandLimitedFunction::from_coeffs(4, coeffs).unwrap();
        let out = quasi_regular_apply(&(rotation_xy(t1) * rotation_yz(t2)), &f).unwrap();
        // leakage is a square root of a difference of squares, so ~1e-8 is round-off
        prop_assert!(out.leakage < 1e-7);
        prop_assert!((out.function.norm() - f.norm()).abs() < 1e-10 * f.norm().max(1.0));
    }

    #[test]
    fn the_action_is_unitary_up_to_leakage(g in group_element(), coeffs in prop::collection::vec(-1.0f64..1.0, 25)) {
        let f = BandLimitedFunction::from_coeffs(4, coeffs).unwrap();
        let out = quasi_regular_apply(&g, &f).unwrap();
        prop_assert!(out.norm_defect < 1e-9);
        prop_assert!(out.function.norm() <= f.norm() * (1.0 + 1e-9));
    }

    #[test]
    fn group_law_within_leakage_bound(g in group_element(), h in group_element()) {
        let f = BandLimitedFunction::harmonic(6, 2, 1).unwrap();
        let (defect, bound) = group_law_defect(&g, &h, &f).unwrap();
        prop_assert!(defect <= bound + 1e-9, "{} > {}", defect, bound);
    }
}
