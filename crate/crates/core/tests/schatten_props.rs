use nalgebra::DMatrix;
use proptest::prelude::*;
use sl3t::schatten::mixed::{conjugate, lp_duality, lp_norm};
use sl3t::schatten::{dyadic_decompose, mixed_norm_lower_bound, MixedNormSpace, SingularProfile};

fn profile() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..10.0, 1..300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dyadic_invariants(values in profile(), r in 1.0f64..6.0) {
        let p = SingularProfile::from_unsorted(values).unwrap();
        let d = dyadic_decompose(&p, r).unwrap();
        prop_assert!(d.verify().is_ok());
        prop_assert!(d.weighted_sum() <= d.weighted_cap() * (1.0 + 1e-12));
        for k in 0..d.alphas.len() {
            prop_assert!(d.rank(k) <= 1 << k);
        }
    }

    #[test]
    fn lp_duality_norms(v in prop::collection::vec(-5.0f64..5.0, 1..20), p in 1.1f64..10.0) {
        let n = lp_norm(v.iter().copied(), p);
        prop_assume!(n > 1e-6);
        let j = lp_duality(&v, p);
        let dn = lp_norm(j.iter().copied(), conjugate(p));
        let pairing: f64 = j.iter().zip(&v).map(|(a, b)| a * b).sum();
        prop_assert!((dn - 1.0).abs() < 1e-9);
        prop_assert!((pairing - n).abs() < 1e-9 * n.max(1.0));
    }

    #[test]
    fn mixed_duality_map_norms(rows in 1usize..6, cols in 1usize..5, p in 1.2f64..8.0, seed in any::<u64>()) {
        let space = MixedNormSpace::new(rows, cols, p).unwrap();
        let x = DMatrix::from_fn(rows, cols, |i, j| (((seed >> ((i * 7 + j) % 60)) & 0xff) as f64 - 127.5) / 64.0);
        let n = space.norm(&x);
        prop_assume!(n > 1e-9);
        let z = space.duality_map(&x);
        prop_assert!((space.dual().norm(&z) - 1.0).abs() < 1e-9);
        prop_assert!((z.dot(&x) - n).abs() < 1e-9 * n.max(1.0));
    }

    #[test]
    fn power_iteration_is_monotone_and_bounded(n in 2usize..8, p in 1.5f64..8.0, seed in 0u64..1000) {
        let t = DMatrix::from_fn(n, n, |i, j| ((i * 31 + j * 17 + seed as usize) % 11) as f64 / 11.0 - 0.5);
        let space = MixedNormSpace::new(n, 3, p).unwrap();
        let est = mixed_norm_lower_bound(&t, &space, 4, 25, seed).unwrap();
        prop_assert!(est.max_decrease() <= 1e-12 * est.value.max(1.0));
        // ‖T ⊗ id‖ on ℓ²(X) is bounded by the norm of |T| on ℓ²
        let abs_norm = t.abs().singular_values().max();
        prop_assert!(est.value <= abs_norm * (1.0 + 1e-9));
    }
}
