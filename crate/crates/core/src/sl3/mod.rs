//! Geometry of `SL(3, ℝ)` with maximal compact subgroup `K = SO(3)`.
//!
//! Double cosets `K g K` are indexed by the Weyl cone
//! `Λ = {(a1, a2, a3) : a1 >= a2 >= a3, a1 + a2 + a3 = 0}` through the
//! logarithms of the singular values. Two families of elements recur:
//!
//! ```text
//! D_α = diag(e^α, e^{-α/2}, e^{-α/2})
//!
//!       ⎛ δ  -√(1-δ²)  0 ⎞
//! x_δ = ⎜ √(1-δ²)  δ   0 ⎟ ∈ K
//!       ⎝ 0     0      1 ⎠
//! ```
//!
//! and the product `D_β x_δ D_α` is block diagonal: a 2×2 block on
//! `span(e1, e2)` and the scalar `e^{-(α+β)/2}` on `e3`.

pub mod embedding;
pub mod kak;

pub use embedding::{embedding2_solve, j_alpha, j_alpha_inverse, Embedding2Certificate, Svd2};
pub use kak::{kak, KakDecomposition};

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Mat3 = Matrix3<f64>;

/// Tolerance for membership tests in `G` and `K` and for `Λ`.
pub const GROUP_TOL: f64 = 1e-10;

/// `|det m - 1| <= tol`.
pub fn is_in_g(m: &Mat3, tol: f64) -> bool {
    (m.determinant() - 1.0).abs() <= tol
}

/// `‖mᵀm - I‖ <= tol` and `det m = 1 ± tol`.
pub fn is_in_k(m: &Mat3, tol: f64) -> bool {
    (m.transpose() * m - Mat3::identity()).norm() <= tol && is_in_g(m, tol)
}

pub fn d_alpha(alpha: f64) -> Mat3 {
    let h = (-alpha / 2.0).exp();
    Mat3::from_diagonal(&nalgebra::Vector3::new(alpha.exp(), h, h))
}

pub fn x_delta(delta: f64) -> Result<Mat3> {
    let delta = crate::legendre::clamp_abscissa(delta).map_err(|_| Error::domain("delta", delta, "[-1, 1]"))?;
    let s = (1.0 - delta * delta).sqrt();
    Ok(Mat3::new(delta, -s, 0.0, s, delta, 0.0, 0.0, 0.0, 1.0))
}

/// Rotation by `theta` in the `(e1, e2)` plane, an element of `Ũ`.
pub fn rotation_xy(theta: f64) -> Mat3 {
    let (s, c) = theta.sin_cos();
    Mat3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Rotation by `theta` in the `(e2, e3)` plane, an element of `U`.
pub fn rotation_yz(theta: f64) -> Mat3 {
    let (s, c) = theta.sin_cos();
    Mat3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

/// Rotation about `e2`.
pub fn rotation_zx(theta: f64) -> Mat3 {
    let (s, c) = theta.sin_cos();
    Mat3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

/// Spectral norm `‖k - I‖`.
pub fn distance_to_identity(k: &Mat3) -> f64 {
    (k - Mat3::identity()).svd(false, false).singular_values.max()
}

/// A point of the Weyl cone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaPoint {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

impl LambdaPoint {
    /// Validates ordering and the trace condition to [`GROUP_TOL`] (relative
    /// to the size of the coordinates).
    pub fn new(a1: f64, a2: f64, a3: f64) -> Result<Self> {
        let scale = a1.abs().max(a3.abs()).max(1.0);
        let tol = GROUP_TOL * scale;
        if ![a1, a2, a3].iter().all(|v| v.is_finite()) {
            return Err(Error::Invalid("Λ coordinates must be finite".into()));
        }
        if a1 < a2 - tol || a2 < a3 - tol {
            return Err(Error::Invalid(format!("({a1}, {a2}, {a3}) is not decreasing")));
        }
        if (a1 + a2 + a3).abs() > tol {
            return Err(Error::Invalid(format!("({a1}, {a2}, {a3}) does not sum to zero")));
        }
        Ok(Self { a1, a2, a3 })
    }

    pub fn origin() -> Self {
        Self {
            a1: 0.0,
            a2: 0.0,
            a3: 0.0,
        }
    }

    /// The symmetry `(a1, a2, a3) ↦ (-a3, -a2, -a1)` induced by
    /// `g ↦ (g⁻¹)ᵀ`.
    pub fn reflect(&self) -> Self {
        Self {
            a1: -self.a3,
            a2: -self.a2,
            a3: -self.a1,
        }
    }

    /// `max(a1, -a3)`.
    pub fn length(&self) -> f64 {
        self.a1.max(-self.a3)
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.a1, self.a2, self.a3]
    }

    pub fn distance(&self, other: &Self) -> f64 {
        let d = [self.a1 - other.a1, self.a2 - other.a2, self.a3 - other.a3];
        d.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `diag(e^{a1}, e^{a2}, e^{a3})`.
    pub fn exp_diag(&self) -> Mat3 {
        Mat3::from_diagonal(&nalgebra::Vector3::new(self.a1.exp(), self.a2.exp(), self.a3.exp()))
    }
}

/// `ℓ(g) = max(log ‖g‖, log ‖g⁻¹‖)`.
pub fn length(g: &Mat3) -> Result<f64> {
    let s = g.svd(false, false).singular_values;
    let (max, min) = (s.max(), s.min());
    if min < 1e-14 {
        return Err(Error::Singular(min));
    }
    Ok(max.ln().max(-min.ln()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn length_examples() {
        assert_eq!(length(&Mat3::identity()).unwrap(), 0.0);
        let e = 1f64.exp();
        let g = Mat3::from_diagonal(&nalgebra::Vector3::new(e * e, 1.0, 1.0 / (e * e)));
        assert_abs_diff_eq!(length(&g).unwrap(), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(length(&d_alpha(1.7)).unwrap(), 1.7, epsilon = 1e-14);
        assert!(matches!(length(&Mat3::zeros()), Err(Error::Singular(_))));
    }

    #[test]
    fn x_delta_is_a_rotation() {
        for &d in &[-1.0, -0.3, 0.0, 0.8, 1.0] {
            let x = x_delta(d).unwrap();
            assert!(is_in_k(&x, 1e-14));
            assert_eq!(x[(0, 0)], d);
        }
        assert!(x_delta(1.1).is_err());
    }

    #[test]
    fn lambda_validation_and_reflection() {
        assert!(LambdaPoint::new(1.0, 0.0, -1.0).is_ok());
        assert!(LambdaPoint::new(0.0, 1.0, -1.0).is_err());
        assert!(LambdaPoint::new(1.0, 0.0, 0.0).is_err());
        let p = LambdaPoint::new(3.0, -1.0, -2.0).unwrap();
        let r = p.reflect();
        assert_eq!(r.to_array(), [2.0, 1.0, -3.0]);
        assert_eq!(r.length(), p.length());
    }

    #[test]
    fn transpose_inverse_reflects_cone_point() {
        let a = LambdaPoint::new(2.0, -0.5, -1.5).unwrap();
        let g = rotation_yz(0.4) * a.exp_diag() * rotation_xy(1.1);
        let theta = g.try_inverse().unwrap().transpose();
        let b = kak(&theta).unwrap().a;
        assert_abs_diff_eq!(b.a1, a.reflect().a1, epsilon = 1e-12);
        assert_abs_diff_eq!(b.a2, a.reflect().a2, epsilon = 1e-12);
    }
}
