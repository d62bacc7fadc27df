//! The random walk whose transition operator is `T_δ`.
//!
//! From `x` the walk jumps to a uniform point of the circle at inner product
//! `δ` from `x`. Degree-one harmonics are eigenfunctions with eigenvalue `δ`,
//! so `E[x_k] = δ^k x_0`.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::legendre::clamp_abscissa;
use crate::rng::stream_rng;

use super::circle::circle_frame;
use super::Vec3;

/// One step of the walk.
pub fn markov_step<R: Rng + ?Sized>(x: &Vec3, delta: f64, rng: &mut R) -> Vec3 {
    let phi = 2.0 * PI * rng.random::<f64>();
    let (u, v) = circle_frame(x);
    let r = (1.0 - delta * delta).max(0.0).sqrt();
    (delta * x + r * (phi.cos() * u + phi.sin() * v)).normalize()
}

/// A single trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovTrace {
    pub delta: f64,
    pub seed: u64,
    pub steps: usize,
    /// `steps + 1` positions starting with the initial point.
    pub positions: Vec<Vec3>,
}

impl MarkovTrace {
    pub fn run(x0: Vec3, delta: f64, steps: usize, seed: u64) -> Result<Self> {
        let delta = clamp_abscissa(delta).map_err(|_| Error::domain("delta", delta, "[-1, 1]"))?;
        let norm = x0.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Invalid("initial point must be a nonzero vector".into()));
        }
        let mut rng = stream_rng(seed, 0);
        let mut positions = Vec::with_capacity(steps + 1);
        let mut x = x0 / norm;
        positions.push(x);
        for _ in 0..steps {
            x = markov_step(&x, delta, &mut rng);
            positions.push(x);
        }
        Ok(Self {
            delta,
            seed,
            steps,
            positions,
        })
    }

    /// Largest `|⟨x_k, x_{k+1}⟩ - δ|` along the trace.
    pub fn max_step_defect(&self) -> f64 {
        self.positions
            .windows(2)
            .map(|w| (w[0].dot(&w[1]) - self.delta).abs())
            .fold(0.0, f64::max)
    }
}

/// Row of a mixing profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub step: usize,
    /// `‖mean of x_k over replicas‖`.
    pub mean_norm: f64,
    /// Monte-Carlo standard error of `mean_norm`: `sqrt(Σ_i Var(x_k,i) / R)`.
    pub mc_sigma: f64,
}

/// Empirical `‖E[x_k]‖` from independent replicas started at `e_3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingProfile {
    pub delta: f64,
    pub seed: u64,
    pub replicas: usize,
    pub rows: Vec<ProfileRow>,
}

const REPLICA_BLOCK: usize = 1024;

/// Run `replicas` independent walks of `steps` steps from `e_3`.
///
/// Replica `i` draws from stream `i` of `seed`; partial sums are formed in
/// fixed blocks and added in order, so the result is bit-reproducible.
pub fn mixing_profile(delta: f64, steps: usize, replicas: usize, seed: u64) -> Result<MixingProfile> {
    let delta = clamp_abscissa(delta).map_err(|_| Error::domain("delta", delta, "[-1, 1]"))?;
    if steps == 0 || replicas == 0 {
        return Err(Error::Invalid("steps and replicas must be >= 1".into()));
    }
    let width = steps + 1;
    let blocks: Vec<(Vec<Vec3>, Vec<Vec3>)> = (0..replicas)
        .collect::<Vec<_>>()
        .par_chunks(REPLICA_BLOCK)
        .map(|chunk| {
            let mut sum = vec![Vec3::zeros(); width];
            let mut sq = vec![Vec3::zeros(); width];
            for &i in chunk {
                let mut rng = stream_rng(seed, i as u64);
                let mut x = Vec3::z();
                for k in 0..width {
                    if k > 0 {
                        x = markov_step(&x, delta, &mut rng);
                    }
                    sum[k] += x;
                    sq[k] += x.component_mul(&x);
                }
            }
            (sum, sq)
        })
        .collect();
    let mut sum = vec![Vec3::zeros(); width];
    let mut sq = vec![Vec3::zeros(); width];
    for (s, q) in &blocks {
        for k in 0..width {
            sum[k] += s[k];
            sq[k] += q[k];
        }
    }
    let r = replicas as f64;
    let rows = (0..width)
        .map(|k| {
            let mean = sum[k] / r;
            let var = (sq[k] / r - mean.component_mul(&mean)).map(|v| v.max(0.0));
            let unbiased = if replicas > 1 { r / (r - 1.0) } else { 1.0 };
            ProfileRow {
                step: k,
                mean_norm: mean.norm(),
                mc_sigma: (var.sum() * unbiased / r).sqrt(),
            }
        })
        .collect();
    Ok(MixingProfile {
        delta,
        seed,
        replicas,
        rows,
    })
}

/// Chi-square test of the walk's occupancy against the uniform measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupancyTest {
    pub delta: f64,
    pub seed: u64,
    pub steps: usize,
    pub thin: usize,
    pub samples: usize,
    pub bins: usize,
    pub statistic: f64,
    pub p_value: f64,
}

/// Count visits in `bands × sectors` equal-area cells (equal-width bands in
/// `z`, equal longitude sectors), keeping every `thin`-th position so that
/// consecutive samples are nearly independent.
pub fn occupancy_chi_square(
    delta: f64,
    steps: usize,
    seed: u64,
    bands: usize,
    sectors: usize,
    thin: usize,
) -> Result<OccupancyTest> {
    if bands == 0 || sectors == 0 || thin == 0 {
        return Err(Error::Invalid("bands, sectors and thin must be >= 1".into()));
    }
    let delta = clamp_abscissa(delta).map_err(|_| Error::domain("delta", delta, "[-1, 1]"))?;
    let mut rng = stream_rng(seed, 0);
    let mut counts = vec![0u64; bands * sectors];
    let mut x = Vec3::z();
    let mut samples = 0;
    for k in 1..=steps {
        x = markov_step(&x, delta, &mut rng);
        if k % thin == 0 {
            let band = (((x.z + 1.0) / 2.0 * bands as f64) as usize).min(bands - 1);
            let phi = x.y.atan2(x.x).rem_euclid(2.0 * PI);
            let sector = ((phi / (2.0 * PI) * sectors as f64) as usize).min(sectors - 1);
            counts[band * sectors + sector] += 1;
            samples += 1;
        }
    }
    let bins = counts.len();
    let expected = samples as f64 / bins as f64;
    let statistic: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let dist = ChiSquared::new((bins - 1) as f64)
        .map_err(|e| Error::Invalid(format!("chi-square distribution: {e}")))?;
    Ok(OccupancyTest {
        delta,
        seed,
        steps,
        thin,
        samples,
        bins,
        statistic,
        p_value: dist.sf(statistic),
    })
}
