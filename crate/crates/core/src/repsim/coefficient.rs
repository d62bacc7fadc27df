//! The `K`-biinvariant coefficient `c(a) = ⟨π(a) 𝟙, 𝟙⟩` and its decay.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::sl3::LambdaPoint;
use crate::sphere::gauss_legendre_on;

use super::graded::{GradedProduct, GradedSpec};

/// `∫ ‖a⁻¹x‖^{-3/2} dσ(x)` on the graded rule of `spec`.
pub fn k_biinvariant_coefficient(a: &LambdaPoint, spec: &GradedSpec) -> f64 {
    let inv = [(-a.a1).exp(), (-a.a2).exp(), (-a.a3).exp()];
    GradedProduct::new(a, spec).integrate(|x| {
        let q = (inv[0] * x.x).powi(2) + (inv[1] * x.y).powi(2) + (inv[2] * x.z).powi(2);
        q.powf(-0.75)
    })
}

/// The same integral as a one-dimensional Gaussian moment.
///
/// With `Q(x) = Σ λ_i x_i²`, `λ_i = e^{-2a_i}`, and `X` standard normal in
/// `ℝ³`, `E Q(X)^{-s} = E|X|^{-2s} · mean_{S²} Q^{-s}` and
/// `Q^{-s} = Γ(s)^{-1} ∫ t^{s-1} e^{-tQ} dt`, which gives
/// `mean Q^{-s} = Γ(3/2) / (2^{-s} Γ(3/2-s) Γ(s)) ∫ t^{s-1} Π (1 + 2tλ_i)^{-1/2} dt`
/// for `s = 3/4`. The `t` integral is done in `u = log t`.
pub fn gaussian_moment_oracle(a: &LambdaPoint) -> f64 {
    let s = 0.75;
    let lam = [(-2.0 * a.a1).exp(), (-2.0 * a.a2).exp(), (-2.0 * a.a3).exp()];
    let f = |u: f64| {
        let t = u.exp();
        let p: f64 = lam.iter().map(|l| (1.0 + 2.0 * t * l).sqrt()).product();
        (s * u).exp() / p
    };
    let (lo, hi, width) = (-90.0, 90.0, 0.25);
    let panels = ((hi - lo) / width) as usize;
    let mut total = 0.0;
    for k in 0..panels {
        let a0 = lo + k as f64 * width;
        let (x, w) = gauss_legendre_on(a0, a0 + width, 16);
        total += x.iter().zip(&w).map(|(x, w)| w * f(*x)).sum::<f64>();
    }
    let norm = gamma(1.5) / (2f64.powf(-s) * gamma(1.5 - s) * gamma(s));
    norm * total
}

/// One row of [`coefficient_decay`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub n: usize,
    pub c_n: f64,
    /// `4 e^{-n/2}`.
    pub bound: f64,
    /// `|c_q - c_{2q}|`, the change when every panel is halved.
    pub leakage: f64,
}

/// Largest `n` accepted by [`coefficient_decay`].
pub const MAX_DECAY_N: usize = 8;

/// `c(n) = ⟨π(diag(e^n, 1, e^{-n})) 𝟙, 𝟙⟩` for `n = 0..=n_max`.
///
/// Each value uses the graded rule of order `band_limit + 1` and is
/// reported at the refined rule; the difference to the unrefined one is the
/// `leakage` column. Fails if that exceeds 10% of `c(n)`, if `c` is not
/// strictly decreasing, or if `c(n) > 4 e^{-n/2}` for some `n >= 1`.
pub fn coefficient_decay(n_max: usize, band_limit: usize) -> Result<Vec<DecayRow>> {
    if n_max > MAX_DECAY_N {
        return Err(Error::domain("n_max", n_max as f64, "[0, 8]"));
    }
    let spec = GradedSpec::for_band_limit(band_limit);
    let mut rows = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let nf = n as f64;
        let a = LambdaPoint::new(nf, 0.0, -nf)?;
        let coarse = k_biinvariant_coefficient(&a, &spec);
        let fine = k_biinvariant_coefficient(&a, &spec.refined());
        let leakage = (coarse - fine).abs();
        if leakage > 0.1 * fine.abs() {
            return Err(Error::Leakage {
                leakage,
                tolerance: 0.1 * fine.abs(),
            });
        }
        rows.push(DecayRow {
            n,
            c_n: fine,
            bound: 4.0 * (-nf / 2.0).exp(),
            leakage,
        });
    }
    for w in rows.windows(2) {
        if !(w[1].c_n < w[0].c_n) || !(w[1].c_n > 0.0) {
            return Err(Error::invariant(
                "coefficient decreasing",
                format!("c({}) = {} is not below c({}) = {}", w[1].n, w[1].c_n, w[0].n, w[0].c_n),
            ));
        }
    }
    for r in rows.iter().filter(|r| r.n >= 1) {
        if r.c_n > r.bound {
            return Err(Error::invariant(
                "coefficient bound",
                format!("c({}) = {} > 4e^(-n/2) = {}", r.n, r.c_n, r.bound),
            ));
        }
    }
    Ok(rows)
}

/// Least-squares slope of `-log c(n)` against `n` over rows with `n >= 1`.
pub fn empirical_exponent(rows: &[DecayRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.n >= 1 && r.c_n > 0.0)
        .map(|r| (r.n as f64, -r.c_n.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const ORACLE: [f64; 6] = [0.7594423424, 0.3957741036, 0.1736234503, 0.0702583004, 0.0272792590, 0.0103555810];

    #[test]
    fn identity_gives_one() {
        let a = LambdaPoint::origin();
        assert_relative_eq!(k_biinvariant_coefficient(&a, &GradedSpec::for_band_limit(8)), 1.0, max_relative = 1e-13);
        assert_relative_eq!(gaussian_moment_oracle(&a), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn matches_gaussian_moment_oracle() {
        let spec = GradedSpec::for_band_limit(16);
        for (i, want) in ORACLE.iter().enumerate() {
            let n = (i + 1) as f64;
            let a = LambdaPoint::new(n, 0.0, -n).unwrap();
            let oracle = gaussian_moment_oracle(&a);
            assert!((oracle - want).abs() < 1e-10);
            assert_relative_eq!(k_biinvariant_coefficient(&a, &spec), oracle, max_relative = 1e-9);
        }
        let a = LambdaPoint::new(2.0, 0.7, -2.7).unwrap();
        assert_relative_eq!(
            k_biinvariant_coefficient(&a, &spec),
            gaussian_moment_oracle(&a),
            max_relative = 1e-9
        );
    }

    #[test]
    fn decay_table() {
        let rows = coefficient_decay(6, 32).unwrap();
        assert_relative_eq!(rows[0].c_n, 1.0, max_relative = 1e-12);
        assert!(rows.iter().all(|r| r.leakage < 1e-8));
        let e = empirical_exponent(&rows).unwrap();
        assert!(e > 0.5, "{e}");
        assert!(coefficient_decay(9, 32).is_err());
    }
}
