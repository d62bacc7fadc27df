//! How far a unit vector of a nontrivial `SO(3)` irreducible can be from
//! being invariant under both `U` (rotations about `e1`) and `Ũ` (about
//! `e3`).
//!
//! On the degree-`j` harmonics `V_j` each subgroup fixes exactly one line:
//! the zonal harmonic about its axis. The two lines meet at angle `ψ` with
//! `cos ψ = P_j(0)`, and `min_{‖a‖=1} ‖a - P_U a‖ + ‖a - P_Ũ a‖ = sin ψ`.

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::legendre::legendre_eval;
use crate::rng::stream_rng;
use crate::sl3::{rotation_xy, rotation_yz, Mat3};
use crate::sphere::{eval_all, num_harmonics, SphereGrid, SphereRule};

/// The block of `π(k)` on `V_j`, by exact analysis on the band-`j` grid.
pub fn rotation_block(j: usize, k: &Mat3) -> DMatrix<f64> {
    let grid = SphereGrid::new(j);
    let (lo, d) = (j * j, 2 * j + 1);
    let mut out = DMatrix::zeros(d, d);
    let mut at = vec![0.0; num_harmonics(j)];
    let mut moved = vec![0.0; num_harmonics(j)];
    for (x, w) in grid.nodes().iter().zip(grid.weights()) {
        eval_all(j, x, &mut at);
        eval_all(j, &(k.transpose() * x), &mut moved);
        for r in 0..d {
            let wr = w * at[lo + r];
            for c in 0..d {
                out[(r, c)] += wr * moved[lo + c];
            }
        }
    }
    out
}

/// `(1/q) Σ_i π(rot(2πi/q))` on `V_j`; with `q = 2j + 1` the average is the
/// exact projection onto the invariant line.
pub fn averaging_projection(j: usize, q: usize, rot: impl Fn(f64) -> Mat3) -> DMatrix<f64> {
    let d = 2 * j + 1;
    let mut p = DMatrix::zeros(d, d);
    for i in 0..q {
        p += rotation_block(j, &rot(std::f64::consts::TAU * i as f64 / q as f64));
    }
    p / q as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantGap {
    pub j: usize,
    /// Smallest `‖a - P_U a‖ + ‖a - P_Ũ a‖` found.
    pub minimum: f64,
    /// The unit vector attaining it, in the real harmonic basis of `V_j`.
    pub minimizer: Vec<f64>,
    /// `√(1 - P_j(0)²)`.
    pub oracle: f64,
    pub starts: usize,
}

fn defect(pu: &DMatrix<f64>, pt: &DMatrix<f64>, a: &DVector<f64>) -> (f64, DVector<f64>) {
    let r1 = a - pu * a;
    let r2 = a - pt * a;
    let (n1, n2) = (r1.norm(), r2.norm());
    let mut g = DVector::zeros(a.len());
    // I - P is a symmetric idempotent, so ∇‖(I-P)a‖ = (I-P)a / ‖(I-P)a‖
    if n1 > 0.0 {
        g += &r1 / n1;
    }
    if n2 > 0.0 {
        g += &r2 / n2;
    }
    (n1 + n2, g)
}

/// Unit vector spanning the range of a rank-one projection.
fn invariant_line(p: &DMatrix<f64>) -> DVector<f64> {
    let (i, _) = p
        .column_iter()
        .enumerate()
        .map(|(i, c)| (i, c.norm()))
        .fold((0, -1.0), |b, c| if c.1 > b.1 { c } else { b });
    let v = p.column(i).into_owned();
    v.normalize()
}

pub const GAP_STARTS: usize = 64;
const GAP_ITERS: usize = 400;

/// Projected (sub)gradient descent on the unit sphere of `V_j` from
/// [`GAP_STARTS`] Gaussian starts plus the two invariant lines.
///
/// Fails if the minimum found is below `1/3`.
pub fn invariant_gap(j: usize, seed: u64) -> Result<InvariantGap> {
    if j == 0 {
        return Err(Error::domain("j", 0.0, "[1, ∞)"));
    }
    let q = 2 * j + 1;
    let pu = averaging_projection(j, q, rotation_yz);
    let pt = averaging_projection(j, q, rotation_xy);
    let d = 2 * j + 1;

    let mut starts: Vec<DVector<f64>> = (0..GAP_STARTS)
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            DVector::from_fn(d, |_, _| StandardNormal.sample(&mut rng)).normalize()
        })
        .collect();
    starts.push(invariant_line(&pu));
    starts.push(invariant_line(&pt));
    let n_starts = starts.len();

    let mut best = (f64::INFINITY, DVector::zeros(d));
    for mut a in starts {
        let (mut val, _) = defect(&pu, &pt, &a);
        if val < best.0 {
            best = (val, a.clone());
        }
        for it in 0..GAP_ITERS {
            let (_, g) = defect(&pu, &pt, &a);
            let tangent = &g - &a * g.dot(&a);
            if tangent.norm() < 1e-14 {
                break;
            }
            let step = 0.2 / (1.0 + it as f64).sqrt();
            a = (&a - tangent * step).normalize();
            val = defect(&pu, &pt, &a).0;
            if val < best.0 {
                best = (val, a.clone());
            }
        }
    }
    let oracle = (1.0 - legendre_eval(j, 0.0)?.powi(2)).sqrt();
    if best.0 < 1.0 / 3.0 {
        return Err(Error::invariant(
            "invariant gap",
            format!("j = {j}: defect sum {} < 1/3", best.0),
        ));
    }
    Ok(InvariantGap {
        j,
        minimum: best.0,
        minimizer: best.1.iter().copied().collect(),
        oracle,
        starts: n_starts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn projections_are_rank_one() {
        for j in 1..=4 {
            let p = averaging_projection(j, 2 * j + 1, rotation_yz);
            assert_abs_diff_eq!(p.trace(), 1.0, epsilon = 1e-12);
            assert!((&p * &p - &p).norm() < 1e-12);
            assert!((&p - p.transpose()).norm() < 1e-12);
        }
    }

    #[test]
    fn e3_average_selects_zonal_harmonic() {
        let p = averaging_projection(3, 7, rotation_xy);
        assert_abs_diff_eq!(p[(3, 3)], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn zonal_vector_about_e1_has_the_expected_defect() {
        let j = 2;
        let pu = averaging_projection(j, 5, rotation_yz);
        let pt = averaging_projection(j, 5, rotation_xy);
        let u = invariant_line(&pu);
        let (v, _) = defect(&pu, &pt, &u);
        assert_abs_diff_eq!(v, (1.0 - 0.25f64).sqrt(), epsilon = 1e-12);
        assert!(v >= 1.0 / 3.0);
    }

    #[test]
    fn minimum_matches_oracle() {
        for j in 1..=4 {
            let g = invariant_gap(j, 7).unwrap();
            assert!(g.minimum >= g.oracle - 1e-12);
            assert_abs_diff_eq!(g.minimum, g.oracle, epsilon = 1e-9);
            let a = DVector::from_vec(g.minimizer.clone());
            assert_abs_diff_eq!(a.norm(), 1.0, epsilon = 1e-12);
        }
    }
}
