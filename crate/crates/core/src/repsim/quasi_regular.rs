//! The quasi-regular representation of `SL(3, ℝ)` on `L²(S²)`:
//! `(π(g) f)(x) = ‖g⁻¹x‖^{-3/2} f(g⁻¹x / ‖g⁻¹x‖)`.
//!
//! Operators are computed in the harmonic basis of band limit `L`. Writing
//! `g = k1 a k2`, the substitution `x = k1 y` gives
//! `⟨π(g) f, Y⟩ = ∫ ‖a⁻¹y‖^{-3/2} f(k2ᵀ â⁻¹y) Y(k1 y) dσ(y)`, so a single
//! quadrature adapted to `a` serves every `g` in the double coset. For
//! `g ∈ K` the integrand has degree `<= 2L` and the exact grid is used.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sl3::{kak, Mat3};
use crate::sphere::{eval_all, num_harmonics, BandLimitedFunction, PointRule, SphereGrid, SphereRule, Vec3};

use super::graded::{graded_rule, GradedSpec};

/// Length below which `g` is treated as a rotation.
const ROTATION_LENGTH: f64 = 1e-13;

const CHUNK: usize = 512;
const FUSED_COLUMNS: usize = 16;

/// `π(g) f` projected to the band limit of `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct Applied {
    pub function: BandLimitedFunction,
    /// `√(‖π(g)f‖² - ‖P_L π(g)f‖²) / ‖π(g)f‖`, both norms by quadrature.
    pub leakage: f64,
    /// `|‖π(g)f‖ / ‖f‖ - 1|` with `‖π(g)f‖` by quadrature; zero in exact
    /// arithmetic since `π` is unitary.
    pub norm_defect: f64,
}

/// `π(g)` applied to the columns of `coeffs` (each a band-`L` function).
/// Returns the projected images and the quadrature value of `‖π(g) f_j‖²`.
fn apply_columns(g: &Mat3, band_limit: usize, coeffs: &DMatrix<f64>) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let dim = num_harmonics(band_limit);
    if coeffs.nrows() != dim {
        return Err(Error::Invalid(format!("expected {dim} coefficients, got {}", coeffs.nrows())));
    }
    let d = kak(g)?;
    let (k1, k2) = (d.k1, d.k2);
    let inv_diag = Vec3::new((-d.a.a1).exp(), (-d.a.a2).exp(), (-d.a.a3).exp());
    let rule = if d.a.length() < ROTATION_LENGTH {
        let g = SphereGrid::new(band_limit);
        PointRule::new(g.nodes().to_vec(), g.weights().to_vec())?
    } else {
        graded_rule(&d.a, &GradedSpec::for_band_limit(band_limit))
    };
    let (nodes, weights) = (rule.nodes(), rule.weights());

    let k = coeffs.ncols();
    let mut out = DMatrix::zeros(dim, k);
    let mut norms = vec![0.0; k];
    let pull = |y: &Vec3| {
        let ay = y.component_mul(&inv_diag);
        let len = ay.norm();
        (len.powf(-1.5), k2.transpose() * (ay / len), k1 * y)
    };
    if k <= FUSED_COLUMNS {
        // few functions: stream node by node with L1-sized buffers
        let (mut src, mut dst) = (vec![0.0; dim], vec![0.0; dim]);
        let cs = coeffs.as_slice();
        let os = out.as_mut_slice();
        for (y, w) in nodes.iter().zip(weights) {
            let (scale, from, to) = pull(y);
            eval_all(band_limit, &from, &mut src);
            eval_all(band_limit, &to, &mut dst);
            for j in 0..k {
                let v = scale * cs[j * dim..(j + 1) * dim].iter().zip(&src).map(|(c, b)| c * b).sum::<f64>();
                norms[j] += w * v * v;
                let wv = w * v;
                os[j * dim..(j + 1) * dim].iter_mut().zip(&dst).for_each(|(o, b)| *o += wv * b);
            }
        }
        return Ok((out, norms));
    }
    // many functions: batch nodes into matrix products, one column per node
    let mut src = DMatrix::zeros(dim, CHUNK);
    let mut dst = DMatrix::zeros(dim, CHUNK);
    for (cn, cw) in nodes.chunks(CHUNK).zip(weights.chunks(CHUNK)) {
        let c = cn.len();
        let mut scale = vec![0.0; c];
        for (r, (y, w)) in cn.iter().zip(cw).enumerate() {
            let (s, from, to) = pull(y);
            scale[r] = s;
            eval_all(band_limit, &from, src.column_mut(r).as_mut_slice());
            let mut col = dst.column_mut(r);
            let basis = col.as_mut_slice();
            eval_all(band_limit, &to, basis);
            basis.iter_mut().for_each(|v| *v *= w);
        }
        let mut vals = src.columns(0, c).tr_mul(coeffs);
        for (r, s) in scale.iter().enumerate() {
            vals.row_mut(r).scale_mut(*s);
        }
        for (j, n) in norms.iter_mut().enumerate().take(k) {
            *n += vals.column(j).iter().zip(cw).map(|(v, w)| w * v * v).sum::<f64>();
        }
        out.gemm(1.0, &dst.columns(0, c), &vals, 1.0);
    }
    Ok((out, norms))
}

fn leakage_of(norm2: f64, projected2: f64) -> f64 {
    if norm2 <= 0.0 {
        0.0
    } else {
        ((norm2 - projected2).max(0.0) / norm2).sqrt()
    }
}

/// `π(g) f` re-projected to the band limit of `f`.
pub fn quasi_regular_apply(g: &Mat3, f: &BandLimitedFunction) -> Result<Applied> {
    let l = f.band_limit();
    let c = DMatrix::from_column_slice(num_harmonics(l), 1, f.coeffs());
    let (out, norms) = apply_columns(g, l, &c)?;
    let function = BandLimitedFunction::from_coeffs(l, out.column(0).iter().copied().collect())?;
    let p2 = function.norm().powi(2);
    let f_norm = f.norm();
    Ok(Applied {
        leakage: leakage_of(norms[0], p2),
        norm_defect: if f_norm > 0.0 {
            (norms[0].sqrt() / f_norm - 1.0).abs()
        } else {
            0.0
        },
        function,
    })
}

/// A dense operator on the band-limited space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepOperatorSample {
    pub g: Mat3,
    pub band_limit: usize,
    pub matrix: DMatrix<f64>,
    /// Largest leakage over the columns that were pushed through `π(g)`.
    pub leakage: f64,
}

impl RepOperatorSample {
    pub fn op_norm(&self) -> f64 {
        self.matrix.singular_values().max()
    }

    /// `‖MᵀM - I‖_F`.
    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.matrix.ncols();
        (self.matrix.transpose() * &self.matrix - DMatrix::identity(n, n)).norm()
    }

    /// Singular values in decreasing order.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.matrix.singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// Second singular value, the distance to rank one.
    pub fn rank_one_defect(&self) -> f64 {
        self.singular_values().get(1).copied().unwrap_or(0.0)
    }
}

/// The matrix of `P_L π(g)` on band limit `L`.
pub fn operator_sample(g: &Mat3, band_limit: usize) -> Result<RepOperatorSample> {
    let dim = num_harmonics(band_limit);
    let (matrix, norms) = apply_columns(g, band_limit, &DMatrix::identity(dim, dim))?;
    let leakage = norms
        .iter()
        .zip(matrix.column_iter())
        .map(|(n2, c)| leakage_of(*n2, c.norm_squared()))
        .fold(0.0, f64::max);
    Ok(RepOperatorSample {
        g: *g,
        band_limit,
        matrix,
        leakage,
    })
}

/// Average of the rotations about `e3` by `2πq/Q`, `q < Q`, in the
/// harmonic basis. Exact projection onto `m = 0` when `Q > L`.
fn z_average(band_limit: usize, q: usize) -> DMatrix<f64> {
    let dim = num_harmonics(band_limit);
    let mut p = DMatrix::zeros(dim, dim);
    for n in 0..=band_limit {
        p[(n * n + n, n * n + n)] = 1.0;
        for m in 1..=n {
            let (ip, im) = (n * n + n + m, n * n + n - m);
            let (mut c, mut s) = (0.0, 0.0);
            for j in 0..q {
                let t = m as f64 * std::f64::consts::TAU * j as f64 / q as f64;
                c += t.cos();
                s += t.sin();
            }
            let (c, s) = (c / q as f64, s / q as f64);
            p[(ip, ip)] = c;
            p[(im, im)] = c;
            p[(ip, im)] = -s;
            p[(im, ip)] = s;
        }
    }
    p
}

/// Haar average over `K` of `π(k)` restricted to the zonal range:
/// column `n` holds `Σ_b w_b π(R_y(β_b)) Y_n^0` with Gauss–Legendre nodes
/// `cos β_b`.
fn y_average_zonal(band_limit: usize, q: usize) -> DMatrix<f64> {
    let grid = SphereGrid::new(band_limit);
    let (cb, wb) = crate::sphere::gauss_legendre(q);
    let dim = num_harmonics(band_limit);
    let mut samples = DMatrix::zeros(grid.len(), band_limit + 1);
    let mut buf = vec![0.0; dim];
    for (i, x) in grid.nodes().iter().enumerate() {
        for (c, w) in cb.iter().zip(&wb) {
            let s = (1.0 - c * c).max(0.0).sqrt();
            // R_y(β)ᵀ x
            let y = Vec3::new(c * x.x - s * x.z, x.y, s * x.x + c * x.z);
            eval_all(band_limit, &y, &mut buf);
            for n in 0..=band_limit {
                samples[(i, n)] += 0.5 * w * buf[n * n + n];
            }
        }
    }
    let basis = crate::sphere::basis_matrix(band_limit, grid.nodes());
    let mut weighted = basis.transpose();
    for (j, w) in grid.weights().iter().enumerate() {
        weighted.column_mut(j).scale_mut(*w);
    }
    weighted * samples
}

/// The average of `π(k)` over `K` computed with an Euler-angle product
/// rule of size `q` per angle, as a dense matrix.
pub fn k_average_projection(band_limit: usize, k_quadrature: usize) -> Result<DMatrix<f64>> {
    check_k_quadrature(band_limit, k_quadrature)?;
    let pz = z_average(band_limit, k_quadrature);
    let s = y_average_zonal(band_limit, k_quadrature);
    let zonal: Vec<usize> = (0..=band_limit).map(|n| n * n + n).collect();
    let zrows = pz.select_rows(&zonal);
    Ok(&pz * s * zrows)
}

fn check_k_quadrature(band_limit: usize, q: usize) -> Result<()> {
    if q < 2 * band_limit + 1 {
        return Err(Error::Quadrature(format!(
            "K quadrature of size {q} needs at least 2L + 1 = {} points per angle",
            2 * band_limit + 1
        )));
    }
    Ok(())
}

/// `∬ π(k g k') dk dk'` on band limit `L`, i.e. `P_K π(g) P_K`.
///
/// The right factor has (numerical) rank at most `L + 1`: its columns are
/// `P_z S` times the zonal rows of the `z`-average. Only the columns of
/// `P_z S` with norm above `1e-13` are pushed through `π(g)`; since `π(g)`
/// is unitary the dropped ones change the result by less than that.
pub fn k_averaged_operator(g: &Mat3, band_limit: usize, k_quadrature: usize) -> Result<RepOperatorSample> {
    check_k_quadrature(band_limit, k_quadrature)?;
    let pz = z_average(band_limit, k_quadrature);
    let s = &pz * y_average_zonal(band_limit, k_quadrature);
    let zonal: Vec<usize> = (0..=band_limit).map(|n| n * n + n).collect();
    let zrows = pz.select_rows(&zonal);
    let pk = &s * &zrows;

    let keep: Vec<usize> = (0..s.ncols()).filter(|&j| s.column(j).norm() > 1e-13).collect();
    let dim = num_harmonics(band_limit);
    let mut gs = DMatrix::zeros(dim, s.ncols());
    let mut leakage: f64 = 0.0;
    if !keep.is_empty() {
        let (out, norms) = apply_columns(g, band_limit, &s.select_columns(&keep))?;
        for (c, &j) in keep.iter().enumerate() {
            gs.set_column(j, &out.column(c));
            leakage = leakage.max(leakage_of(norms[c], out.column(c).norm_squared()));
        }
    }
    Ok(RepOperatorSample {
        g: *g,
        band_limit,
        matrix: pk * gs * zrows,
        leakage,
    })
}

/// `‖π(g)π(h)f - π(gh)f‖` together with the leakage of the inner step,
/// which bounds it up to quadrature error.
pub fn group_law_defect(g: &Mat3, h: &Mat3, f: &BandLimitedFunction) -> Result<(f64, f64)> {
    let inner = quasi_regular_apply(h, f)?;
    let two_step = quasi_regular_apply(g, &inner.function)?;
    let direct = quasi_regular_apply(&(g * h), f)?;
    let mut diff = two_step.function.clone();
    diff.coeffs_mut()
        .iter_mut()
        .zip(direct.function.coeffs())
        .for_each(|(a, b)| *a -= b);
    Ok((diff.norm(), inner.leakage * f.norm()))
}
