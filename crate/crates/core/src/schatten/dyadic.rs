//! Singular-value profiles and their dyadic block decomposition.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Singular values `λ_1 >= λ_2 >= ... >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularProfile(Vec<f64>);

impl SingularProfile {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::Invalid(format!("singular value {v} is not a finite nonnegative number")));
        }
        if let Some(i) = values.windows(2).position(|w| w[1] > w[0]) {
            return Err(Error::Invalid(format!(
                "profile increases at index {}: {} < {}",
                i + 1,
                values[i],
                values[i + 1]
            )));
        }
        Ok(Self(values))
    }

    /// Absolute values sorted in decreasing order, e.g. from a diagonal
    /// operator.
    pub fn from_unsorted(values: impl IntoIterator<Item = f64>) -> Result<Self> {
        let mut v: Vec<f64> = values.into_iter().map(f64::abs).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        Self::new(v)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest singular value, i.e. the operator norm.
    pub fn op_norm(&self) -> f64 {
        self.0.first().copied().unwrap_or(0.0)
    }

    /// `(Σ λ_n^r)^{1/r}`.
    pub fn schatten_norm(&self, r: f64) -> f64 {
        if r.is_infinite() {
            return self.op_norm();
        }
        self.0.iter().map(|v| v.powf(r)).sum::<f64>().powf(1.0 / r)
    }
}

/// `T = Σ_k α_k u_k` with `α_k = λ_{2^k}` and `u_k` the part of `T` on the
/// singular indices `2^k ..= 2^{k+1} - 1` (1-based), rescaled by `1/α_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicDecomposition {
    pub r: f64,
    pub alphas: Vec<f64>,
    /// 0-based index ranges into the profile.
    pub blocks: Vec<Range<usize>>,
    profile: SingularProfile,
}

impl DyadicDecomposition {
    /// `rank(u_k)`, at most `2^k`.
    pub fn rank(&self, k: usize) -> usize {
        self.blocks[k].len()
    }

    /// `‖u_k‖ = λ_{2^k} / α_k`; 0 for a vanishing block.
    pub fn block_norm(&self, k: usize) -> f64 {
        let a = self.alphas[k];
        if a == 0.0 {
            0.0
        } else {
            self.profile.values()[self.blocks[k].start] / a
        }
    }

    /// Singular values of `u_k`.
    pub fn block(&self, k: usize) -> Vec<f64> {
        let a = self.alphas[k];
        self.profile.values()[self.blocks[k].clone()]
            .iter()
            .map(|v| if a == 0.0 { 0.0 } else { v / a })
            .collect()
    }

    /// `Σ_k 2^k |α_k|^r`.
    pub fn weighted_sum(&self) -> f64 {
        self.alphas
            .iter()
            .enumerate()
            .map(|(k, a)| 2f64.powi(k as i32) * a.abs().powf(self.r))
            .sum()
    }

    /// `2 ‖T‖_{S^r}^r`.
    pub fn weighted_cap(&self) -> f64 {
        2.0 * self.profile.values().iter().map(|v| v.powf(self.r)).sum::<f64>()
    }

    /// Singular values of `Σ_k α_k u_k`, in block order.
    pub fn reconstruct(&self) -> Vec<f64> {
        (0..self.alphas.len())
            .flat_map(|k| {
                let a = self.alphas[k];
                self.block(k).into_iter().map(move |v| a * v)
            })
            .collect()
    }

    /// Check rank, norm, summability and reconstruction.
    pub fn verify(&self) -> Result<()> {
        for k in 0..self.alphas.len() {
            if self.rank(k) > 1 << k {
                return Err(Error::invariant("dyadic rank", format!("block {k} has rank {}", self.rank(k))));
            }
            if self.block_norm(k) > 1.0 + 1e-15 {
                return Err(Error::invariant(
                    "dyadic block norm",
                    format!("block {k} has norm {}", self.block_norm(k)),
                ));
            }
        }
        let (sum, cap) = (self.weighted_sum(), self.weighted_cap());
        if sum > cap * (1.0 + 1e-12) {
            return Err(Error::invariant(
                "dyadic summability",
                format!("Σ 2^k α_k^r = {sum} exceeds 2‖T‖^r = {cap}"),
            ));
        }
        let rebuilt = self.reconstruct();
        let err = rebuilt
            .iter()
            .zip(self.profile.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if rebuilt.len() != self.profile.len() || err > 1e-14 * self.profile.op_norm().max(1.0) {
            return Err(Error::invariant("dyadic reconstruction", format!("error {err:e}")));
        }
        Ok(())
    }
}

pub fn dyadic_decompose(profile: &SingularProfile, r: f64) -> Result<DyadicDecomposition> {
    if !(r >= 1.0) || !r.is_finite() {
        return Err(Error::domain("r", r, "[1, ∞)"));
    }
    let n = profile.len();
    let mut alphas = Vec::new();
    let mut blocks = Vec::new();
    let mut k = 0;
    while (1usize << k) <= n {
        let start = (1usize << k) - 1;
        let end = ((1usize << (k + 1)) - 1).min(n);
        alphas.push(profile.values()[start]);
        blocks.push(start..end);
        k += 1;
    }
    Ok(DyadicDecomposition {
        r,
        alphas,
        blocks,
        profile: profile.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_value() {
        let d = dyadic_decompose(&SingularProfile::new(vec![1.0]).unwrap(), 2.0).unwrap();
        assert_eq!(d.alphas, vec![1.0]);
        assert_eq!(d.weighted_sum(), 1.0);
        d.verify().unwrap();
    }

    #[test]
    fn harmonic_profile_closed_form() {
        let p = SingularProfile::new((1..=1024).map(|n| 1.0 / n as f64).collect()).unwrap();
        let d = dyadic_decompose(&p, 2.0).unwrap();
        assert_eq!(d.alphas.len(), 11);
        let expected: f64 = (0..11).map(|k| 0.5f64.powi(k)).sum();
        assert_abs_diff_eq!(d.weighted_sum(), expected, epsilon = 1e-14);
        assert!(d.weighted_sum() < 2.0);
        d.verify().unwrap();
    }

    #[test]
    fn blocks_partition_the_profile() {
        let p = SingularProfile::new((0..100).map(|i| 100.0 - i as f64).collect()).unwrap();
        let d = dyadic_decompose(&p, 1.5).unwrap();
        let mut next = 0;
        for b in &d.blocks {
            assert_eq!(b.start, next);
            next = b.end;
        }
        assert_eq!(next, 100);
        assert_eq!(d.rank(6), 100 - 63);
    }

    #[test]
    fn rejects_bad_profiles() {
        assert!(SingularProfile::new(vec![1.0, 2.0]).is_err());
        assert!(SingularProfile::new(vec![-1.0]).is_err());
        assert!(dyadic_decompose(&SingularProfile::new(vec![1.0]).unwrap(), 0.5).is_err());
    }

    #[test]
    fn zero_tail_blocks() {
        let p = SingularProfile::new(vec![2.0, 1.0, 0.0, 0.0, 0.0]).unwrap();
        let d = dyadic_decompose(&p, 2.0).unwrap();
        assert_eq!(d.block_norm(2), 0.0);
        d.verify().unwrap();
    }
}
