//! The twelve end-to-end acceptance checks, shared by the `acceptance`
//! test target and `sl3t check-all`.
//!
//! Each check returns an [`Outcome`] instead of panicking so that a run
//! reports every criterion, including the failing ones.

use std::time::Instant;

use nalgebra::Vector3;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::legendre::{holder_bound, LegendreTable};
use crate::repsim::{coefficient_decay, invariant_gap};
use crate::rng::stream_rng;
use crate::schatten::{
    defect_matrix, dyadic_decompose, interpolation_theta, mixed_norm_lower_bound, MixedNormSpace, SingularProfile,
};
use crate::sl3::embedding::{embedding2_solve, quarter_turn};
use crate::sl3::{j_alpha, j_alpha_inverse, kak, rotation_xy, rotation_yz, rotation_zx, Mat3};
use crate::spectral::{divergence_probe_p4, dyadic_delta_grid, fit_power_law, schatten_limit, Exponent, TruncationPolicy};
use crate::sphere::circle::circle_average_basis;
use crate::sphere::{basis_matrix, mixing_profile, SphereGrid, SphereRule};
use crate::zigzag::{annulus_diameter_bound, annulus_point, cauchy_tail_constant, tail_partial_sums, ExponentProfile};

/// Seed used by every stochastic check.
pub const ACCEPTANCE_SEED: u64 = 20_260_101;

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    /// One-line summary of the measured quantities.
    pub summary: String,
    /// Per-case evidence.
    pub details: Vec<String>,
    pub seconds: f64,
}

impl Outcome {
    /// `PASS [ 1] holder-bound: ...`.
    pub fn line(&self) -> String {
        format!(
            "{} [{:>2}] {}: {} ({:.2} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.summary,
            self.seconds
        )
    }
}

struct Check {
    id: u8,
    name: &'static str,
    start: Instant,
    details: Vec<String>,
}

impl Check {
    fn new(id: u8, name: &'static str) -> Self {
        Self {
            id,
            name,
            start: Instant::now(),
            details: Vec::new(),
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.details.push(s.into());
    }

    fn finish(self, passed: bool, summary: impl Into<String>) -> Outcome {
        Outcome {
            id: self.id,
            name: self.name,
            passed,
            summary: summary.into(),
            details: self.details,
            seconds: self.start.elapsed().as_secs_f64(),
        }
    }

    fn elapsed(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }

    fn error(self, e: crate::Error) -> Outcome {
        self.finish(false, format!("error: {e}"))
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// `|P_n(0) - P_n(δ)| <= 4√|δ|` for `n <= 2000` on 1000 deltas in `[-1, 1]`.
pub fn holder_bound_check() -> Outcome {
    let mut c = Check::new(1, "holder-bound");
    let (n_max, grid) = (2000, linspace(-1.0, 1.0, 1000));
    let zero = match LegendreTable::new(n_max, 0.0) {
        Ok(t) => t,
        Err(e) => return c.error(e),
    };
    let (mut violations, mut worst) = (0usize, 0.0f64);
    for &d in &grid {
        let t = match LegendreTable::new(n_max, d) {
            Ok(t) => t,
            Err(e) => return c.error(e),
        };
        let bound = holder_bound(d);
        for (a, b) in zero.values().iter().zip(t.values()) {
            let defect = (a - b).abs();
            if defect > bound {
                violations += 1;
            }
            if bound > 0.0 {
                worst = worst.max(defect / bound);
            }
        }
    }
    let secs = c.elapsed();
    c.note(format!("largest defect / 4√|δ| = {worst:.6}"));
    c.finish(
        violations == 0 && secs < 10.0,
        format!("{violations} violations over n <= {n_max} and {} deltas; worst ratio {worst:.4}; budget 10 s", grid.len()),
    )
}

/// Truncation-doubling stabilization and decay exponents of `‖T_0 - T_δ‖_{S^p}`.
pub fn schatten_decay_check() -> Outcome {
    let mut c = Check::new(2, "schatten-decay");
    let policy = TruncationPolicy::default();
    let grid = dyadic_delta_grid(10);
    let mut ok = true;
    let mut unstable = 0;
    for p in [4.5, 5.0, 6.0, 8.0] {
        let mut values = Vec::new();
        for &d in &grid {
            let lim = match schatten_limit(d, p, &policy) {
                Ok(l) => l,
                Err(e) => return c.error(e),
            };
            if !lim.stabilized {
                unstable += 1;
                ok = false;
                c.note(format!(
                    "p = {p}, δ = {d:e}: relative change {:.3e} at N = {} (not stabilized)",
                    lim.relative_change,
                    lim.degree()
                ));
            }
            values.push((d, lim.value()));
        }
        let fit = match fit_power_law(Exponent::Finite(p), values) {
            Ok(f) => f,
            Err(e) => return c.error(e),
        };
        let need = 0.5 - 2.0 / p - 0.05;
        let pass = fit.exponent >= need;
        ok &= pass;
        c.note(format!(
            "p = {p}: fitted exponent {:.4} (need >= {need:.4}, theory {:.4})",
            fit.exponent,
            0.5 - 2.0 / p
        ));
    }
    let secs = c.elapsed();
    ok &= secs < 120.0;
    c.finish(ok, format!("{unstable} unstabilized cells of 40; budget 120 s"))
}

/// `3 log 2 / (π² (1 - δ²))`: the limit of the dyadic increments of
/// `Σ (2n+1) P_n(δ)^4` from the Bernstein asymptotics.
pub fn p4_increment_prediction(delta: f64) -> f64 {
    3.0 * std::f64::consts::LN_2 / (std::f64::consts::PI.powi(2) * (1.0 - delta * delta))
}

/// Dyadic increments of the fourth-power sums stay bounded below.
pub fn boundary_probe_check() -> Outcome {
    let mut c = Check::new(3, "p4-boundary-probe");
    let degrees: Vec<usize> = (10..=16).map(|k| 1 << k).collect();
    let mut ok = true;
    for d in [0.1, 0.3, 0.5] {
        let probe = match divergence_probe_p4(d, &degrees) {
            Ok(p) => p,
            Err(e) => return c.error(e),
        };
        let predicted = p4_increment_prediction(d);
        let (lo, hi) = (probe.min_increment(), probe.max_increment());
        let pass = lo >= 0.5 * predicted && probe.strictly_increasing();
        ok &= pass;
        c.note(format!(
            "δ = {d}: increments in [{lo:.5}, {hi:.5}], predicted limit {predicted:.5}"
        ));
    }
    c.finish(ok, "every increment through N = 2^16 is at least half the predicted limit")
}

/// Averaging each harmonic over circles reproduces `P_n(δ) Y_n^m`.
pub fn spectral_quadrature_check() -> Outcome {
    let mut c = Check::new(4, "spectral-quadrature");
    let l = 32;
    let m = 2 * l + 1;
    let grid = SphereGrid::new(l);
    let y = basis_matrix(l, grid.nodes());
    let mut worst = 0.0f64;
    for d in linspace(-0.95, 0.95, 20) {
        let avg = match circle_average_basis(l, d, m, grid.nodes()) {
            Ok(a) => a,
            Err(e) => return c.error(e),
        };
        let pn = match LegendreTable::new(l, d) {
            Ok(t) => t,
            Err(e) => return c.error(e),
        };
        let mut err = 0.0f64;
        for n in 0..=l {
            for col in n * n..(n + 1) * (n + 1) {
                for row in 0..y.nrows() {
                    err = err.max((avg[(row, col)] - pn.get(n) * y[(row, col)]).abs());
                }
            }
        }
        worst = worst.max(err);
    }
    let secs = c.elapsed();
    c.note(format!("{} nodes, {} harmonics, {m} circle points", grid.nodes().len(), y.ncols()));
    c.finish(
        worst <= 1e-8 && secs < 60.0,
        format!("sup error {worst:.3e} over n <= {l} and 20 deltas; budget 60 s"),
    )
}

/// `‖E x_k‖` against `|δ|^k` within three Monte-Carlo sigmas.
pub fn markov_contraction_check() -> Outcome {
    let mut c = Check::new(5, "markov-contraction");
    let (steps, replicas) = (15, 100_000);
    let mut misses = 0;
    let mut worst = 0.0f64;
    for d in [0.0, 0.3, 0.6, 0.9] {
        let prof = match mixing_profile(d, steps, replicas, ACCEPTANCE_SEED) {
            Ok(p) => p,
            Err(e) => return c.error(e),
        };
        for r in &prof.rows {
            let expected = d.abs().powi(r.step as i32);
            let dev = (r.mean_norm - expected).abs();
            let z = if r.mc_sigma > 0.0 { dev / r.mc_sigma } else if dev == 0.0 { 0.0 } else { f64::INFINITY };
            worst = worst.max(z);
            if dev > 3.0 * r.mc_sigma {
                misses += 1;
                c.note(format!("δ = {d}, k = {}: {} vs {expected} ({z:.2}σ)", r.step, r.mean_norm));
            }
        }
    }
    c.finish(
        misses == 0,
        format!("{misses} of 64 cells outside 3σ; largest deviation {worst:.2}σ; {replicas} replicas"),
    )
}

/// `Σ 2^k |α_k|^r <= 2 ‖T‖_{S^r}^r` and the other block invariants.
pub fn dyadic_decomposition_check() -> Outcome {
    let mut c = Check::new(6, "dyadic-decomposition");
    let mut violations = 0;
    let mut worst = 0.0f64;
    for i in 0..100 {
        let mut rng = stream_rng(ACCEPTANCE_SEED, 600 + i);
        let len = rng.random_range(1..=600);
        let decay: f64 = rng.random_range(0.0..2.0);
        let values: Vec<f64> = (1..=len)
            .map(|n| rng.random::<f64>() * (n as f64).powf(-decay))
            .collect();
        let profile = match SingularProfile::from_unsorted(values) {
            Ok(p) => p,
            Err(e) => return c.error(e),
        };
        for r in [1.0, 1.5, 2.0, 4.0] {
            let d = match dyadic_decompose(&profile, r) {
                Ok(d) => d,
                Err(e) => return c.error(e),
            };
            if let Err(e) = d.verify() {
                violations += 1;
                c.note(format!("profile {i}, r = {r}: {e}"));
            }
            if d.weighted_cap() > 0.0 {
                worst = worst.max(d.weighted_sum() / d.weighted_cap());
            }
        }
    }
    c.finish(
        violations == 0,
        format!("{violations} violations on 100 profiles x 4 exponents; largest sum / cap {worst:.4}"),
    )
}

/// Witnessed lower bounds never exceed the interpolation bound.
pub fn interpolation_check() -> Outcome {
    let mut c = Check::new(7, "interpolation");
    let (truncation, inner, restarts, iters) = (12, 3, 32, 30);
    let mut violations = 0;
    for p in [4.0, 6.0, 8.0] {
        let theta = interpolation_theta(p);
        for d in [0.025, 0.05, 0.1, 0.2] {
            let t = match defect_matrix(d, truncation) {
                Ok(t) => t,
                Err(e) => return c.error(e),
            };
            let space = match MixedNormSpace::new(t.nrows(), inner, p) {
                Ok(s) => s,
                Err(e) => return c.error(e),
            };
            let est = match mixed_norm_lower_bound(&t, &space, restarts, iters, ACCEPTANCE_SEED) {
                Ok(e) => e,
                Err(e) => return c.error(e),
            };
            let bound = 2f64.powf(1.0 - theta) * (4.0 * d.sqrt()).powf(theta) + 1e-9;
            let bad = est.restart_values.iter().filter(|&&v| v > bound).count();
            violations += bad;
            c.note(format!("p = {p}, δ = {d}: lower bound {:.6} <= {bound:.6}", est.value));
        }
    }
    c.finish(
        violations == 0,
        format!("{violations} violations over 12 cells x {restarts} restarts"),
    )
}

fn random_rotation<R: Rng>(rng: &mut R) -> Mat3 {
    let mut a = || rng.random_range(0.0..std::f64::consts::TAU);
    rotation_xy(a()) * rotation_yz(a()) * rotation_zx(a())
}

/// Cartan reconstruction, the endpoints of `j_α`, and the `δ` bound.
pub fn kak_fidelity_check() -> Outcome {
    let mut c = Check::new(8, "kak-fidelity");
    let mut worst = 0.0f64;
    let mut bad_kak = 0;
    for i in 0..1000u64 {
        let mut rng = stream_rng(ACCEPTANCE_SEED, 800 + i);
        let g = if i % 2 == 0 {
            let mut m = Mat3::from_fn(|_, _| StandardNormal.sample(&mut rng));
            if m.determinant() < 0.0 {
                m.row_mut(0).neg_mut();
            }
            m / m.determinant().cbrt()
        } else {
            let a1: f64 = rng.random_range(0.0..6.0);
            let a3: f64 = -rng.random_range(0.0..6.0);
            let mut v = [a1, -a1 - a3, a3];
            v.sort_by(|x, y| y.total_cmp(x));
            let diag = Vector3::new(v[0].exp(), v[1].exp(), v[2].exp());
            random_rotation(&mut rng) * Mat3::from_diagonal(&diag) * random_rotation(&mut rng)
        };
        match kak(&g) {
            Ok(d) => {
                let r = d.residual(&g);
                worst = worst.max(r);
                if r > 1e-9 {
                    bad_kak += 1;
                }
            }
            Err(e) => {
                bad_kak += 1;
                c.note(format!("sample {i}: {e}"));
            }
        }
    }
    c.note(format!("largest KAK residual {worst:.3e}"));

    let mut endpoint_err = 0.0f64;
    let alphas = linspace(0.5, 5.0, 10);
    for &a in &alphas {
        let at = |d: f64| j_alpha(a, d).map(|p| p.to_array());
        let (lo, hi) = match (at(0.0), at(1.0)) {
            (Ok(x), Ok(y)) => (x, y),
            (Err(e), _) | (_, Err(e)) => return c.error(e),
        };
        let want_lo = [a / 2.0, a / 2.0, -a];
        let want_hi = [2.0 * a, -a, -a];
        for k in 0..3 {
            endpoint_err = endpoint_err.max((lo[k] - want_lo[k]).abs()).max((hi[k] - want_hi[k]).abs());
        }
    }
    c.note(format!("largest j_α endpoint error {endpoint_err:.3e}"));

    let mut bad_delta = 0;
    let mut margin = f64::INFINITY;
    for &a in &alphas {
        for e in linspace(-0.5, 1.0, 10) {
            let d = match j_alpha_inverse(a, (1.0 + e) * a) {
                Ok(d) => d,
                Err(err) => return c.error(err),
            };
            let bound = ((e - 1.0) * a).exp();
            margin = margin.min(bound - d);
            if d > bound * (1.0 + 1e-12) {
                bad_delta += 1;
                c.note(format!("α = {a}, ε = {e}: δ = {d} > {bound}"));
            }
        }
    }
    c.finish(
        bad_kak == 0 && endpoint_err <= 1e-9 && bad_delta == 0,
        format!(
            "KAK {bad_kak}/1000 over 1e-9 (worst {worst:.2e}); endpoint error {endpoint_err:.2e}; δ-bound {bad_delta}/100 violations, min margin {margin:.3e}"
        ),
    )
}

/// Both factorizations and their bounds, and the quarter turn at `7γ/6`.
pub fn embedding2_check() -> Outcome {
    let mut c = Check::new(9, "embedding2");
    let mut failures = 0;
    let mut turn_err = 0.0f64;
    for g in [2.0, 4.0, 8.0, 16.0] {
        for a in linspace(g, 7.0 * g / 6.0, 20) {
            match embedding2_solve(g, a).and_then(|cert| cert.verify().map(|_| cert)) {
                Ok(cert) => {
                    if a == 7.0 * g / 6.0 {
                        let e = (cert.k2 - quarter_turn()).abs().max();
                        turn_err = turn_err.max(e);
                        c.note(format!("γ = {g}: ‖k2 - quarter turn‖ = {e:.2e}"));
                    }
                }
                Err(e) => {
                    failures += 1;
                    c.note(format!("γ = {g}, α = {a}: {e}"));
                }
            }
        }
    }
    c.finish(
        failures == 0 && turn_err <= 1e-9,
        format!("{failures} of 80 certificates failed; quarter-turn error {turn_err:.2e}"),
    )
}

/// The tail constant against a direct geometric sum, and every annulus
/// ledger against its bound.
pub fn zigzag_check() -> Outcome {
    let mut c = Check::new(10, "zigzag-constants");
    let prof = ExponentProfile::unitary();
    let closed = match cauchy_tail_constant(&prof) {
        Ok(v) => v,
        Err(e) => return c.error(e),
    };
    let lead = 6.0 * prof.scale() * prof.holder_s.exp();
    let ratio = prof.decay_rate().exp();
    let (mut sum, mut term, mut k) = (0.0f64, lead, 0);
    while term > 1e-20 * sum.max(lead) {
        sum += term;
        k += 1;
        term = lead * ratio.powi(k);
    }
    let rel = (closed - sum).abs() / sum;
    c.note(format!("C' closed form {closed:.15}, direct sum {sum:.15} ({k} terms)"));

    let mut bad = 0;
    let mut ledgers = 0;
    let mut worst = 0.0f64;
    for (ai, alpha) in [1.0, 2.0, 4.0, 8.0, 16.0].into_iter().enumerate() {
        if let Err(e) = tail_partial_sums(&prof, alpha, 64) {
            bad += 1;
            c.note(format!("α = {alpha}: {e}"));
        }
        for (ei, eps) in [0.1, 0.25, 0.5].into_iter().enumerate() {
            let mut rng = stream_rng(ACCEPTANCE_SEED, 1000 + 10 * ai as u64 + ei as u64);
            for _ in 0..40 {
                let mut pt = || annulus_point(alpha, eps, rng.random(), rng.random(), rng.random());
                let (p, q) = match (pt(), pt()) {
                    (Ok(p), Ok(q)) => (p, q),
                    (Err(e), _) | (_, Err(e)) => return c.error(e),
                };
                ledgers += 1;
                match annulus_diameter_bound(alpha, eps, &prof, &p, &q) {
                    Ok(cert) => {
                        if cert.bound > 0.0 {
                            worst = worst.max(cert.ledger.total / cert.bound);
                        }
                    }
                    Err(e) => {
                        bad += 1;
                        c.note(format!("α = {alpha}, ε = {eps}: {e}"));
                    }
                }
            }
        }
    }
    c.finish(
        rel <= 1e-12 && bad == 0,
        format!("C' relative error {rel:.2e}; {bad} of {ledgers} ledgers over bound (largest total / bound {worst:.4})"),
    )
}

/// `c(n)` decreasing and below `4 e^{-n/2}` at band limit 32.
pub fn howe_moore_check() -> Outcome {
    let mut c = Check::new(11, "coefficient-decay");
    match coefficient_decay(6, 32) {
        Ok(rows) => {
            let mut leak = 0.0f64;
            for r in &rows {
                leak = leak.max(r.leakage / r.c_n);
                c.note(format!("n = {}: c = {:.10}, bound {:.10}, leakage {:.2e}", r.n, r.c_n, r.bound, r.leakage));
            }
            c.finish(leak < 0.1, format!("decreasing and under 4e^(-n/2) for n = 1..6; relative leakage {leak:.2e}"))
        }
        Err(e) => c.error(e),
    }
}

/// Invariant-gap minimization on `V_1, ..., V_6`.
pub fn invariant_gap_check() -> Outcome {
    let mut c = Check::new(12, "invariant-gap");
    let mut smallest = f64::INFINITY;
    for j in 1..=6 {
        match invariant_gap(j, ACCEPTANCE_SEED) {
            Ok(g) => {
                smallest = smallest.min(g.minimum);
                let v: Vec<String> = g.minimizer.iter().map(|x| format!("{x:.4}")).collect();
                c.note(format!("j = {j}: minimum {:.10} (oracle {:.10}) at [{}]", g.minimum, g.oracle, v.join(", ")));
            }
            Err(e) => return c.error(e),
        }
    }
    c.finish(smallest >= 1.0 / 3.0, format!("smallest defect sum {smallest:.6} >= 1/3"))
}

/// Every check in order.
pub const CHECKS: [fn() -> Outcome; 12] = [
    holder_bound_check,
    schatten_decay_check,
    boundary_probe_check,
    spectral_quadrature_check,
    markov_contraction_check,
    dyadic_decomposition_check,
    interpolation_check,
    kak_fidelity_check,
    embedding2_check,
    zigzag_check,
    howe_moore_check,
    invariant_gap_check,
];

pub fn run_all() -> Vec<Outcome> {
    CHECKS.iter().map(|f| f()).collect()
}
