//! The maps `δ ↦ K D_β x_δ D_α K` into `Λ` and the explicit factorizations
//! of `D_{2γ-α} x_δ D_α` used to move between `U`- and `Ũ`-double cosets.
//!
//! All computations use the 2×2 block of `D_β x_δ D_α` and its closed-form
//! SVD, which stays accurate when the entries span many orders of magnitude.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{d_alpha, distance_to_identity, rotation_xy, x_delta, LambdaPoint, Mat3};

/// `M = R(φ) · diag(sx, sy) · R(θ)` for a real 2×2 matrix, `sx >= |sy|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Svd2 {
    pub phi: f64,
    pub sx: f64,
    pub sy: f64,
    pub theta: f64,
}

impl Svd2 {
    /// Closed form via the decomposition of `M` into a rotation-like part
    /// `(E, H)` and a reflection-like part `(F, G)`. `sy` takes the sign of
    /// `det M`.
    pub fn new(m: [[f64; 2]; 2]) -> Self {
        let [[a, b], [c, d]] = m;
        let (e, f) = ((a + d) / 2.0, (a - d) / 2.0);
        let (g, h) = ((c + b) / 2.0, (c - b) / 2.0);
        let q = e.hypot(h);
        let r = f.hypot(g);
        let sx = q + r;
        let det = a * d - b * c;
        let sy = if sx == 0.0 { 0.0 } else { det / sx };
        let a1 = g.atan2(f);
        let a2 = h.atan2(e);
        Self {
            phi: (a2 + a1) / 2.0,
            sx,
            sy,
            theta: (a2 - a1) / 2.0,
        }
    }

    pub fn reconstruct(&self) -> [[f64; 2]; 2] {
        let (sp, cp) = self.phi.sin_cos();
        let (st, ct) = self.theta.sin_cos();
        // R(φ) diag(sx, sy) R(θ)
        let l = [[cp * self.sx, -sp * self.sy], [sp * self.sx, cp * self.sy]];
        [
            [l[0][0] * ct + l[0][1] * st, -l[0][0] * st + l[0][1] * ct],
            [l[1][0] * ct + l[1][1] * st, -l[1][0] * st + l[1][1] * ct],
        ]
    }
}

/// Upper-left block of `D_β x_δ D_α`.
pub fn block(alpha: f64, beta: f64, delta: f64) -> [[f64; 2]; 2] {
    let s = (1.0 - delta * delta).max(0.0).sqrt();
    [
        [delta * (alpha + beta).exp(), -s * (beta - alpha / 2.0).exp()],
        [s * (alpha - beta / 2.0).exp(), delta * (-(alpha + beta) / 2.0).exp()],
    ]
}

/// Cone point of `D_β x_δ D_α` for `α >= β >= 0`.
pub fn block_point(alpha: f64, beta: f64, delta: f64) -> Result<LambdaPoint> {
    let svd = Svd2::new(block(alpha, beta, delta));
    let half = (alpha + beta) / 2.0;
    let a1 = svd.sx.ln();
    LambdaPoint::new(a1, half - a1, -half)
}

fn check_delta(delta: f64) -> Result<f64> {
    crate::legendre::clamp_abscissa(delta).map_err(|_| Error::domain("delta", delta, "[-1, 1]"))
}

/// `j_α(δ)`, the cone point of `D_α x_δ D_α`.
///
/// Lies on the slice `a3 = -α`, runs from `(α/2, α/2, -α)` at `δ = 0` to
/// `(2α, -α, -α)` at `δ = 1`, and is even in `δ`.
pub fn j_alpha(alpha: f64, delta: f64) -> Result<LambdaPoint> {
    if !(alpha >= 0.0) {
        return Err(Error::domain("alpha", alpha, "[0, ∞)"));
    }
    block_point(alpha, alpha, check_delta(delta)?)
}

/// Bisection for `sx(δ) = target` on `[0, 1]` with `sx` the top singular
/// value of the block; runs until the bracket cannot shrink further.
///
/// Returns exactly `0` when `sx(0)` already matches the target to a
/// relative `1e-12`. Every midpoint must fall between the bracket values
/// up to a few ulps of round-off, otherwise the map is not monotone and the
/// search aborts.
fn bisect_top_singular(alpha: f64, beta: f64, log_target: f64) -> Result<f64> {
    let f = |d: f64| Svd2::new(block(alpha, beta, d)).sx.ln();
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let (mut flo, mut fhi) = (f(lo), f(hi));
    if (flo - log_target).abs() <= 1e-12 {
        return Ok(0.0);
    }
    if (fhi - log_target).abs() <= 1e-12 {
        return Ok(1.0);
    }
    if !(flo < log_target && log_target < fhi) {
        return Err(Error::Bisection(format!(
            "log target {log_target} outside the attainable range [{flo}, {fhi}]"
        )));
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        let ulps = 16.0 * f64::EPSILON * fm.abs().max(1.0);
        if !(flo - ulps <= fm && fm <= fhi + ulps) {
            return Err(Error::Bisection(format!(
                "top singular value is not monotone near δ = {mid}: {flo} <= {fm} <= {fhi} fails"
            )));
        }
        if fm < log_target {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    Ok(if (flo - log_target).abs() <= (fhi - log_target).abs() {
        lo
    } else {
        hi
    })
}

/// The `δ ∈ [0, 1]` with `j_α(δ).a1 = a1`.
pub fn j_alpha_inverse(alpha: f64, a1: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::domain("alpha", alpha, "(0, ∞)"));
    }
    bisect_top_singular(alpha, alpha, a1)
}

/// Factorizations of `D_{2γ-α} x_{δ_i} D_α` inside `Ũ · A · Ũ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Embedding2Certificate {
    pub gamma: f64,
    pub alpha: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub k1: Mat3,
    pub k1p: Mat3,
    pub k2: Mat3,
    pub k2p: Mat3,
    /// Rotation angles of `k1, k1', k2, k2'` in the `(e1, e2)` plane.
    pub angles: [f64; 4],
    /// `‖D x D - k diag k'‖_F / ‖D x D‖_F` for the two factorizations.
    pub residual1: f64,
    pub residual2: f64,
}

/// Checks reported by [`Embedding2Certificate::verify`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Embedding2Margins {
    pub delta_bound: f64,
    pub rotation_bound: f64,
    pub k1_distance: f64,
    pub k1p_distance: f64,
    pub k2p_distance: f64,
}

pub const EMBEDDING_RESIDUAL_TOL: f64 = 1e-9;

impl Embedding2Certificate {
    pub fn beta(&self) -> f64 {
        2.0 * self.gamma - self.alpha
    }

    pub fn margins(&self) -> Embedding2Margins {
        Embedding2Margins {
            delta_bound: (-self.gamma).exp(),
            rotation_bound: 2.0 * (-self.gamma / 4.0).exp(),
            k1_distance: distance_to_identity(&self.k1),
            k1p_distance: distance_to_identity(&self.k1p),
            k2p_distance: distance_to_identity(&self.k2p),
        }
    }

    /// Check both factorizations, the bound on `δ_i` and the bounds on the
    /// rotations.
    pub fn verify(&self) -> Result<Embedding2Margins> {
        let m = self.margins();
        let slack = 1e-12;
        if self.residual1 > EMBEDDING_RESIDUAL_TOL || self.residual2 > EMBEDDING_RESIDUAL_TOL {
            return Err(Error::invariant(
                "embedding2 factorization",
                format!("residuals {:e}, {:e}", self.residual1, self.residual2),
            ));
        }
        for (name, d) in [("delta1", self.delta1), ("delta2", self.delta2)] {
            if !(0.0..=1.0).contains(&d) || d > m.delta_bound * (1.0 + slack) {
                return Err(Error::invariant(
                    "embedding2 delta bound",
                    format!("{name} = {d:e} exceeds e^-γ = {:e}", m.delta_bound),
                ));
            }
        }
        for (name, d) in [("k1", m.k1_distance), ("k1'", m.k1p_distance), ("k2'", m.k2p_distance)] {
            if d > m.rotation_bound * (1.0 + slack) {
                return Err(Error::invariant(
                    "embedding2 rotation bound",
                    format!("‖{name} - 1‖ = {d} exceeds 2e^-γ/4 = {}", m.rotation_bound),
                ));
            }
        }
        Ok(m)
    }
}

fn factor(alpha: f64, beta: f64, delta: f64, diag: [f64; 3]) -> Result<(Mat3, Mat3, f64, f64, f64)> {
    let svd = Svd2::new(block(alpha, beta, delta));
    let (mut phi, mut theta) = (svd.phi, svd.theta);
    if theta.cos() < 0.0 {
        // (k, k') -> (-k, -k') keeps the product and makes cos θ' >= 0
        phi += std::f64::consts::PI;
        theta += std::f64::consts::PI;
    }
    let (k, kp) = (rotation_xy(phi), rotation_xy(theta));
    let target = d_alpha(beta) * x_delta(delta)? * d_alpha(alpha);
    let d = Mat3::from_diagonal(&nalgebra::Vector3::new(diag[0], diag[1], diag[2]));
    let residual = (k * d * kp - target).norm() / target.norm();
    Ok((k, kp, phi, theta, residual))
}

/// Solve both factorizations for `γ >= 1/2`, `γ <= α <= 7γ/6`.
pub fn embedding2_solve(gamma: f64, alpha: f64) -> Result<Embedding2Certificate> {
    if !(gamma >= 0.5) || !gamma.is_finite() {
        return Err(Error::domain("gamma", gamma, "[1/2, ∞)"));
    }
    let upper = 7.0 * gamma / 6.0;
    if !(alpha >= gamma * (1.0 - 1e-15) && alpha <= upper * (1.0 + 1e-15)) {
        return Err(Error::domain("alpha", alpha, "[γ, 7γ/6]"));
    }
    let alpha = alpha.clamp(gamma, upper);
    let beta = 2.0 * gamma - alpha;
    let delta1 = bisect_top_singular(alpha, beta, gamma)?;
    let delta2 = bisect_top_singular(alpha, beta, 0.75 * gamma)?;
    let (k1, k1p, t1, t1p, residual1) = factor(alpha, beta, delta1, [gamma.exp(), 1.0, (-gamma).exp()])?;
    let (k2, k2p, t2, t2p, residual2) = factor(
        alpha,
        beta,
        delta2,
        [(0.75 * gamma).exp(), (0.25 * gamma).exp(), (-gamma).exp()],
    )?;
    let wrap = |t: f64| (t + std::f64::consts::PI).rem_euclid(2.0 * std::f64::consts::PI) - std::f64::consts::PI;
    Ok(Embedding2Certificate {
        gamma,
        alpha,
        delta1,
        delta2,
        k1,
        k1p,
        k2,
        k2p,
        angles: [wrap(t1), wrap(t1p), wrap(t2), wrap(t2p)],
        residual1,
        residual2,
    })
}

/// The rotation expected for `k2` at `α = 7γ/6`.
pub fn quarter_turn() -> Mat3 {
    rotation_xy(FRAC_PI_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sl3::kak;
    use approx::assert_abs_diff_eq;

    #[test]
    fn svd2_reconstructs() {
        for m in [
            [[1.0, 2.0], [3.0, 4.0]],
            [[0.0, -1.0], [5.0, 0.0]],
            [[2.0, 0.0], [0.0, 0.5]],
            [[1e6, -3.0], [2e-3, 1e-6]],
        ] {
            let s = Svd2::new(m);
            let r = s.reconstruct();
            for i in 0..2 {
                for j in 0..2 {
                    assert_abs_diff_eq!(r[i][j], m[i][j], epsilon = 1e-12 * s.sx);
                }
            }
            assert!(s.sx >= s.sy.abs());
        }
    }

    #[test]
    fn j_alpha_endpoints() {
        for &a in &[0.5, 1.0, 3.0, 7.0] {
            let p0 = j_alpha(a, 0.0).unwrap();
            assert_abs_diff_eq!(p0.a1, a / 2.0, epsilon = 1e-12);
            assert_abs_diff_eq!(p0.a2, a / 2.0, epsilon = 1e-12);
            assert_abs_diff_eq!(p0.a3, -a, epsilon = 1e-15);
            let p1 = j_alpha(a, 1.0).unwrap();
            assert_abs_diff_eq!(p1.a1, 2.0 * a, epsilon = 1e-12);
            assert_abs_diff_eq!(p1.a2, -a, epsilon = 1e-12);
        }
    }

    #[test]
    fn j_alpha_matches_kak_and_is_even() {
        let a = 1.4;
        for &d in &[0.1, 0.45, 0.9] {
            let g = d_alpha(a) * x_delta(d).unwrap() * d_alpha(a);
            let k = kak(&g).unwrap();
            let j = j_alpha(a, d).unwrap();
            assert_abs_diff_eq!(k.a.a1, j.a1, epsilon = 1e-10);
            assert_abs_diff_eq!(k.a.a3, j.a3, epsilon = 1e-10);
            let jm = j_alpha(a, -d).unwrap();
            assert_abs_diff_eq!(jm.a1, j.a1, epsilon = 1e-12);
        }
    }

    #[test]
    fn inverse_roundtrip_and_delta_bound() {
        let (a, eps) = (3.0, 0.5);
        let d = j_alpha_inverse(a, (1.0 + eps) * a).unwrap();
        assert_abs_diff_eq!(j_alpha(a, d).unwrap().a1, 4.5, epsilon = 1e-12);
        assert!(d <= ((eps - 1.0) * a).exp());
        assert!(j_alpha_inverse(a, 7.0).is_err());
    }

    #[test]
    fn quarter_turn_at_upper_end() {
        let g = 3.0;
        let c = embedding2_solve(g, 7.0 * g / 6.0).unwrap();
        assert_eq!(c.delta2, 0.0);
        assert!((c.k2 - quarter_turn()).norm() < 1e-9);
        c.verify().unwrap();
    }

    #[test]
    fn certificate_at_gamma_four() {
        let c = embedding2_solve(4.0, 4.0).unwrap();
        let m = c.verify().unwrap();
        assert!(c.delta1 <= (-4.0f64).exp() && c.delta2 <= (-4.0f64).exp());
        assert!(m.k1_distance <= 2.0 * (-1.0f64).exp());
    }

    #[test]
    fn preconditions() {
        assert!(embedding2_solve(0.2, 0.2).is_err());
        assert!(embedding2_solve(2.0, 1.9).is_err());
        assert!(embedding2_solve(2.0, 2.5).is_err());
    }
}
