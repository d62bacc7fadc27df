use proptest::prelude::*;
use sl3t::legendre::legendre_eval;
use sl3t::rng::stream_rng;
use sl3t::sphere::circle::circle_average_function;
use sl3t::sphere::{markov_step, BandLimitedFunction, SphereGrid, SphereRule, Vec3};

fn unit() -> impl Strategy<Value = Vec3> {
    (-1.0f64..1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(z, phi)| {
        let r = (1.0 - z * z).sqrt();
        Vec3::new(r * phi.cos(), r * phi.sin(), z)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn markov_step_keeps_the_inner_product(x in unit(), delta in -1.0f64..=1.0, seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 0);
        let y = markov_step(&x, delta, &mut rng);
        prop_assert!((y.norm() - 1.0).abs() < 1e-12);
        prop_assert!((x.dot(&y) - delta).abs() < 1e-12);
    }

    #[test]
    fn circle_average_is_diagonal(coeffs in prop::collection::vec(-1.0f64..1.0, 49), delta in -1.0f64..=1.0) {
        let f = BandLimitedFunction::from_coeffs(6, coeffs).unwrap();
        let g = circle_average_function(&f, delta, 13).unwrap();
        for n in 0..=6usize {
            let pn = legendre_eval(n, delta).unwrap();
            for m in -(n as i64)..=(n as i64) {
                prop_assert!((g.coeff(n, m) - pn * f.coeff(n, m)).abs() < 1e-12);
            }
        }
        prop_assert!(g.norm() <= f.norm() * (1.0 + 1e-12));
    }

    #[test]
    fn analysis_inverts_synthesis(coeffs in prop::collection::vec(-1.0f64..1.0, 64)) {
        let f = BandLimitedFunction::from_coeffs(7, coeffs).unwrap();
        let grid = SphereGrid::new(7);
        let back = BandLimitedFunction::analyze(7, &grid, &f.samples(&grid));
        prop_assert!(back.max_abs_diff(&f) < 1e-12);
    }
}

#[test]
fn grid_weights_sum_to_one() {
    for l in [0, 1, 5, 16, 32] {
        let g = SphereGrid::new(l);
        let s: f64 = g.weights().iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert!(g.nodes().iter().all(|x| (x.norm() - 1.0).abs() < 1e-12));
    }
}
