//! Lower bounds for `‖T ⊗ id_{ℓ^p_m}‖` on the mixed space `ℓ²_n(ℓ^p_m)`.
//!
//! Elements are `n × m` matrices; row `i` is the `ℓ^p` fibre over the
//! Euclidean index `i`, and `T ⊗ id` acts as `X ↦ T X`. Computing the exact
//! norm is hard in general, so [`mixed_norm_lower_bound`] runs a nonlinear
//! power iteration whose values never decrease and are each attained by an
//! explicit witness.

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// `ℓ²_n(ℓ^p_m)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedNormSpace {
    pub outer_dim: usize,
    pub inner_dim: usize,
    pub inner_exponent: f64,
}

impl MixedNormSpace {
    pub fn new(outer_dim: usize, inner_dim: usize, inner_exponent: f64) -> Result<Self> {
        if outer_dim == 0 || inner_dim == 0 {
            return Err(Error::Invalid("mixed-norm dimensions must be >= 1".into()));
        }
        if !(inner_exponent >= 1.0) {
            return Err(Error::domain("p", inner_exponent, "[1, ∞]"));
        }
        Ok(Self {
            outer_dim,
            inner_dim,
            inner_exponent,
        })
    }

    /// The dual space `ℓ²_n(ℓ^{p'}_m)`.
    pub fn dual(&self) -> Self {
        Self {
            inner_exponent: conjugate(self.inner_exponent),
            ..*self
        }
    }

    pub fn norm(&self, x: &DMatrix<f64>) -> f64 {
        x.row_iter()
            .map(|row| lp_norm(row.iter().copied(), self.inner_exponent).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// A norming functional: `z` in the dual unit sphere with
    /// `⟨z, x⟩ = ‖x‖`. Returns zero for `x = 0`.
    pub fn duality_map(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let total = self.norm(x);
        let mut z = DMatrix::zeros(x.nrows(), x.ncols());
        if total == 0.0 {
            return z;
        }
        for (i, row) in x.row_iter().enumerate() {
            let v: Vec<f64> = row.iter().copied().collect();
            let rn = lp_norm(v.iter().copied(), self.inner_exponent);
            if rn == 0.0 {
                continue;
            }
            let j = lp_duality(&v, self.inner_exponent);
            for (c, val) in j.into_iter().enumerate() {
                z[(i, c)] = rn / total * val;
            }
        }
        z
    }
}

/// `p / (p - 1)`, with `1 ↔ ∞`.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

pub fn lp_norm(v: impl Iterator<Item = f64> + Clone, p: f64) -> f64 {
    let max = v.clone().fold(0.0, |m: f64, x| m.max(x.abs()));
    if p.is_infinite() || max == 0.0 {
        return max;
    }
    max * v.map(|x| (x.abs() / max).powf(p)).sum::<f64>().powf(1.0 / p)
}

/// Unit norming functional of `v ∈ ℓ^p` in `ℓ^{p'}`.
///
/// `sign(v) |v|^{p-1} / ‖v‖_p^{p-1}` for `1 < p < ∞`; `sign(v)` for
/// `p = 1`; at `p = ∞`, mass `1/k` on each of the `k` coordinates within a
/// relative `1e-12` of the maximum.
pub fn lp_duality(v: &[f64], p: f64) -> Vec<f64> {
    let norm = lp_norm(v.iter().copied(), p);
    if norm == 0.0 {
        return vec![0.0; v.len()];
    }
    if p == 1.0 {
        return v.iter().map(|x| if *x == 0.0 { 0.0 } else { x.signum() }).collect();
    }
    if p.is_infinite() {
        let tied: Vec<bool> = v.iter().map(|x| x.abs() >= norm * (1.0 - 1e-12)).collect();
        let k = tied.iter().filter(|t| **t).count() as f64;
        return v
            .iter()
            .zip(&tied)
            .map(|(x, &t)| if t { x.signum() / k } else { 0.0 })
            .collect();
    }
    v.iter()
        .map(|x| x.signum() * (x.abs() / norm).powf(p - 1.0))
        .collect()
}

/// Output of [`mixed_norm_lower_bound`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedNormEstimate {
    /// `‖T witness‖` with `‖witness‖ = 1`.
    pub value: f64,
    pub witness: DMatrix<f64>,
    /// Value after each iteration of the best restart.
    pub history: Vec<f64>,
    /// Final value of every restart.
    pub restart_values: Vec<f64>,
}

impl MixedNormEstimate {
    /// Largest drop along the best restart's history (zero when monotone).
    pub fn max_decrease(&self) -> f64 {
        self.history
            .windows(2)
            .map(|w| w[0] - w[1])
            .fold(0.0, f64::max)
    }
}

/// Power iteration for `‖T ⊗ id‖` on `space`.
///
/// Each step maps `x ↦ J_{E*}(Tᵀ J_E(T x))` where `J` are duality maps.
/// Since `‖T x_{k+1}‖ >= ⟨J_E(T x_k), T x_{k+1}⟩ = ‖Tᵀ J_E(T x_k)‖_* >= ‖T x_k‖`
/// the recorded values never decrease. Restart `i` starts from a Gaussian
/// matrix drawn from stream `i` of `seed`, normalized in `space`.
pub fn mixed_norm_lower_bound(
    t: &DMatrix<f64>,
    space: &MixedNormSpace,
    restarts: usize,
    iters: usize,
    seed: u64,
) -> Result<MixedNormEstimate> {
    if t.nrows() != t.ncols() || t.nrows() != space.outer_dim {
        return Err(Error::Invalid(format!(
            "operator is {}x{} but the space has outer dimension {}",
            t.nrows(),
            t.ncols(),
            space.outer_dim
        )));
    }
    if restarts == 0 {
        return Err(Error::Invalid("need at least one restart".into()));
    }
    let dual = space.dual();
    let tt = t.transpose();
    let runs: Vec<(f64, DMatrix<f64>, Vec<f64>)> = (0..restarts)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let mut x = DMatrix::from_fn(space.outer_dim, space.inner_dim, |_, _| {
                StandardNormal.sample(&mut rng)
            });
            x /= space.norm(&x);
            let mut y = t * &x;
            let mut best = (space.norm(&y), x.clone());
            let mut history = vec![best.0];
            for _ in 0..iters {
                let z = space.duality_map(&y);
                let w = &tt * z;
                if dual.norm(&w) == 0.0 {
                    break;
                }
                x = dual.duality_map(&w);
                y = t * &x;
                let v = space.norm(&y) / space.norm(&x);
                history.push(v);
                if v > best.0 {
                    best = (v, x.clone());
                }
            }
            (best.0, best.1, history)
        })
        .collect();
    let restart_values: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let (value, witness, history) = runs
        .into_iter()
        .reduce(|a, b| if b.0 > a.0 { b } else { a })
        .expect("restarts >= 1");
    Ok(MixedNormEstimate {
        value,
        witness,
        history,
        restart_values,
    })
}

/// `regular_norm^{1-θ} op_norm^θ`.
pub fn interpolation_bound(op_norm_l2: f64, regular_norm: f64, theta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::domain("theta", theta, "[0, 1]"));
    }
    if !(op_norm_l2 >= 0.0) || !(regular_norm >= 0.0) {
        return Err(Error::Invalid("norms must be nonnegative".into()));
    }
    Ok(regular_norm.powf(1.0 - theta) * op_norm_l2.powf(theta))
}

/// Interpolation parameter of `ℓ^p` between `ℓ²` and `ℓ^∞` (or `ℓ¹`):
/// `min(2/p, 2 - 2/p)`.
pub fn interpolation_theta(p: f64) -> f64 {
    if p.is_infinite() {
        return 0.0;
    }
    (2.0 / p).min(2.0 - 2.0 / p)
}

/// Operator norm on `ℓ²` of the entrywise absolute value of `t`, an upper
/// bound for the regular norm.
pub fn regular_norm_bound(t: &DMatrix<f64>) -> f64 {
    t.abs().singular_values().max()
}
