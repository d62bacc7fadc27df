//! Cartan decomposition `g = k1 · exp(a) · k2`.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{LambdaPoint, Mat3};

/// `g = k1 · diag(e^{a1}, e^{a2}, e^{a3}) · k2` with `k1, k2 ∈ SO(3)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KakDecomposition {
    pub k1: Mat3,
    pub a: LambdaPoint,
    pub k2: Mat3,
}

impl KakDecomposition {
    pub fn reconstruct(&self) -> Mat3 {
        self.k1 * self.a.exp_diag() * self.k2
    }

    /// `‖reconstruct() - g‖_F / max(1, ‖g‖_F)`.
    pub fn residual(&self, g: &Mat3) -> f64 {
        (self.reconstruct() - g).norm() / g.norm().max(1.0)
    }
}

/// Determinant tolerance accepted by [`kak`]; looser than
/// [`super::GROUP_TOL`] because the determinant of an ill-conditioned
/// matrix carries round-off proportional to its condition number.
pub const DET_TOL: f64 = 1e-8;

/// SVD-based Cartan decomposition.
///
/// Singular values are sorted in decreasing order. If the orthogonal factors
/// have determinant `-1` (they always agree in sign since `det g > 0`), the
/// last column of the left factor and the last row of the right factor are
/// negated together.
pub fn kak(g: &Mat3) -> Result<KakDecomposition> {
    let svd = g.svd(true, true);
    let (u, vt) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let s = svd.singular_values;
    if s.min() < 1e-14 {
        return Err(Error::Singular(s.min()));
    }
    let log_det: f64 = s.iter().map(|v| v.ln()).sum();
    if log_det.abs() > DET_TOL || g.determinant() < 0.0 {
        return Err(Error::Invalid(format!(
            "matrix is not in SL(3): |det| = {}, sign {}",
            log_det.exp(),
            g.determinant().signum()
        )));
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));
    let mut k1 = Mat3::from_columns(&[u.column(order[0]), u.column(order[1]), u.column(order[2])]);
    let mut k2 = Mat3::from_rows(&[vt.row(order[0]), vt.row(order[1]), vt.row(order[2])]);
    if k1.determinant() < 0.0 {
        k1.column_mut(2).neg_mut();
        k2.row_mut(2).neg_mut();
    }
    let logs = Vector3::new(s[order[0]].ln(), s[order[1]].ln(), s[order[2]].ln());
    let mean = logs.sum() / 3.0;
    let a = LambdaPoint::new(logs[0] - mean, logs[1] - mean, logs[2] - mean)?;
    Ok(KakDecomposition { k1, a, k2 })
}
