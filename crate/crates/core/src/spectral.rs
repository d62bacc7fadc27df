//! Spectral model of the circle-averaging operators `T_δ` on `L²(S²)`.
//!
//! `T_δ` acts on degree-`n` spherical harmonics by the scalar `P_n(δ)`, and
//! that eigenspace has dimension `2n + 1`. Everything here works with this
//! diagonal model: operator and Schatten norms of `T_0 - T_δ`, their limits
//! as the truncation degree grows, and power-law fits in `δ`.
//!
//! # Schatten limits
//!
//! For `p > 4` the terms `(2n+1)|P_n(0) - P_n(δ)|^p` decay like
//! `n^{1-p/2}` times an oscillating factor, so plain partial sums converge
//! only like `N^{2-p/2}`. At `p = 4.5` that is hopeless for a `1e-6`
//! tolerance. [`schatten_limit`] instead uses a smooth cutoff
//!
//! ```text
//! S(M) = Σ_n t_n ψ(n/M),   ψ(x) = erfc(A (x - c)) / 2,
//! ```
//!
//! which removes the oscillating part of the remainder, leaving
//! `S(∞) - S(M) ≈ κ M^{2-p/2}`. One Richardson step with that known exponent
//! cancels the leading term. The raw partial sums are still available as
//! [`schatten_norm_diff`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::legendre::{self, legendre_iter};

/// A Schatten exponent: a positive real or `∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn finite(p: f64) -> Result<Self> {
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::domain("p", p, "(0, ∞)"));
        }
        Ok(Exponent::Finite(p))
    }

    /// `p` as a float, with `∞` mapped to `f64::INFINITY`.
    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    /// The exponent `1/2 - 2/p` of the expected power law in `δ`.
    pub fn decay_exponent(self) -> f64 {
        0.5 - 2.0 / self.value()
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Exponent::Infinity),
            other => {
                let p: f64 = other
                    .parse()
                    .map_err(|_| Error::Invalid(format!("cannot parse exponent `{s}`")))?;
                Exponent::finite(p)
            }
        }
    }
}

/// Truncated diagonal model of `T_δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralOperator {
    delta: f64,
    eigenvalues: Vec<f64>,
}

impl SpectralOperator {
    pub fn new(delta: f64, truncation: usize) -> Result<Self> {
        let delta = legendre::clamp_abscissa(delta)?;
        let eigenvalues = legendre_iter(delta)?.take(truncation + 1).collect();
        Ok(Self { delta, eigenvalues })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn truncation(&self) -> usize {
        self.eigenvalues.len() - 1
    }

    /// `P_n(δ)`.
    pub fn eigenvalue(&self, n: usize) -> f64 {
        self.eigenvalues[n]
    }

    pub fn multiplicity(n: usize) -> usize {
        2 * n + 1
    }

    /// Dimension `(N+1)²` of the truncated space.
    pub fn dimension(&self) -> usize {
        self.eigenvalues.len().pow(2)
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Diagonal entries with each eigenvalue repeated by its multiplicity.
    pub fn expanded_diagonal(&self) -> Vec<f64> {
        expand(&self.eigenvalues)
    }
}

fn expand(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .enumerate()
        .flat_map(|(n, &v)| std::iter::repeat(v).take(2 * n + 1))
        .collect()
}

/// `d_n = P_n(0) - P_n(δ)` for `n = 0..=N`, the spectrum of `T_0 - T_δ`.
pub fn defect_sequence(delta: f64, truncation: usize) -> Result<Vec<f64>> {
    let delta = legendre::clamp_abscissa(delta)?;
    Ok(legendre_iter(0.0)?
        .zip(legendre_iter(delta)?)
        .take(truncation + 1)
        .map(|(a, b)| a - b)
        .collect())
}

/// Diagonal of the truncated `T_0 - T_δ` with multiplicities, as a dense
/// vector of length `(N+1)²`.
pub fn defect_diagonal(delta: f64, truncation: usize) -> Result<Vec<f64>> {
    Ok(expand(&defect_sequence(delta, truncation)?))
}

/// Upper bound for `|P_n(0) - P_n(δ)|` valid for every `n > N`.
///
/// Uses the Bernstein envelope for both terms; at `δ = ±1` the second term
/// is exactly 1.
pub fn defect_tail_envelope(delta: f64, truncation: usize) -> f64 {
    let n = truncation + 1;
    let at_zero = legendre::bernstein_envelope_at(n, 0.0);
    if delta == 0.0 {
        return 0.0;
    }
    let at_delta = if delta.abs() >= 1.0 {
        1.0
    } else {
        legendre::bernstein_envelope_at(n, delta)
    };
    at_zero + at_delta
}

/// Operator norm of the truncated `T_0 - T_δ`, with a tail certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpNormDiff {
    pub delta: f64,
    pub truncation: usize,
    /// `max_{n<=N} |P_n(0) - P_n(δ)|`.
    pub head: f64,
    /// Degree attaining `head`.
    pub argmax: usize,
    /// Bound on `sup_{n>N} |P_n(0) - P_n(δ)|`.
    pub tail_envelope: f64,
    pub head_dominates: bool,
}

impl OpNormDiff {
    /// The head supremum; nondecreasing in the truncation.
    pub fn value(&self) -> f64 {
        self.head
    }

    /// Certified upper bound for the untruncated norm.
    pub fn certified(&self) -> f64 {
        self.head.max(self.tail_envelope)
    }
}

pub fn op_norm_diff(delta: f64, truncation: usize) -> Result<OpNormDiff> {
    if truncation < 2 {
        return Err(Error::Invalid(format!("truncation must be >= 2, got {truncation}")));
    }
    let d = defect_sequence(delta, truncation)?;
    let (argmax, head) = d
        .iter()
        .map(|v| v.abs())
        .enumerate()
        .fold((0, 0.0), |best, (n, v)| if v > best.1 { (n, v) } else { best });
    let tail_envelope = defect_tail_envelope(delta, truncation);
    Ok(OpNormDiff {
        delta,
        truncation,
        head,
        argmax,
        tail_envelope,
        head_dominates: head >= tail_envelope,
    })
}

/// Certified operator norm of `T_0 - T_δ`: doubles `N` from 1024 until the
/// head dominates the tail envelope (or `max_degree` is reached).
pub fn op_norm_limit(delta: f64, max_degree: usize) -> Result<OpNormDiff> {
    let mut n = 1024.min(max_degree).max(2);
    loop {
        let r = op_norm_diff(delta, n)?;
        if r.head_dominates || n >= max_degree {
            return Ok(r);
        }
        n = (2 * n).min(max_degree);
    }
}

/// `(Σ_{n<=N} (2n+1) |P_n(δ) - P_n(0)|^p)^{1/p}`; at `p = ∞` the head of
/// [`op_norm_diff`].
pub fn schatten_norm_diff(delta: f64, p: Exponent, truncation: usize) -> Result<f64> {
    match p {
        Exponent::Infinity => Ok(op_norm_diff(delta, truncation)?.value()),
        Exponent::Finite(p) => {
            if truncation < 2 {
                return Err(Error::Invalid(format!("truncation must be >= 2, got {truncation}")));
            }
            let d = defect_sequence(delta, truncation)?;
            let s: f64 = d
                .iter()
                .enumerate()
                .map(|(n, v)| (2 * n + 1) as f64 * v.abs().powf(p))
                .sum();
            Ok(s.powf(1.0 / p))
        }
    }
}

/// Truncation schedule and tolerances for [`schatten_limit`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub start: usize,
    pub max_degree: usize,
    /// Required ratio of the envelope tail to the head sum.
    pub tail_tolerance: f64,
    /// Required relative change between successive doublings.
    pub stabilization: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            start: 1 << 10,
            max_degree: 1 << 18,
            tail_tolerance: 1e-8,
            stabilization: 1e-6,
        }
    }
}

/// Cutoff parameters: `ψ(x) = erfc(A (x - c)) / 2` truncated at `x_max`.
const WINDOW_SLOPE: f64 = 3.0;
const WINDOW_CENTER: f64 = 2.0;
const WINDOW_EXTENT: f64 = 4.0;

/// One level of the doubling schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchattenLevel {
    pub degree: usize,
    /// Plain truncated norm at this degree.
    pub direct: f64,
    /// Windowed and extrapolated estimate of the untruncated norm.
    pub estimate: f64,
}

/// Result of [`schatten_limit`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchattenLimit {
    pub delta: f64,
    pub p: f64,
    pub levels: Vec<SchattenLevel>,
    /// `|estimate_N - estimate_{N/2}| / estimate_N` at the last level.
    pub relative_change: f64,
    /// Envelope bound of the `p`-th power tail beyond the last degree,
    /// relative to the head sum.
    pub relative_tail: f64,
    /// The relative change met the policy tolerance.
    pub stabilized: bool,
    /// The envelope tail met the policy tolerance, certifying the direct sum.
    pub tail_certified: bool,
}

impl SchattenLimit {
    /// Best estimate of `‖T_0 - T_δ‖_{S^p}`.
    pub fn value(&self) -> f64 {
        self.levels.last().map_or(0.0, |l| l.estimate)
    }

    pub fn degree(&self) -> usize {
        self.levels.last().map_or(0, |l| l.degree)
    }
}

/// Envelope bound for `Σ_{n>N} (2n+1) |P_n(0) - P_n(δ)|^p`.
fn schatten_tail_envelope(delta: f64, p: f64, n: usize) -> f64 {
    // |d_m| <= K m^{-1/2} for m > N, with K from the Bernstein envelope.
    let s = (1.0 - delta * delta).sqrt();
    let k = (2.0 / std::f64::consts::PI).sqrt() * (1.0 + s.powf(-0.5));
    let a = p / 2.0;
    let nf = n as f64;
    k.powf(p) * (2.0 * nf.powf(2.0 - a) / (a - 2.0) + nf.powf(1.0 - a) / (a - 1.0))
}

/// Estimate `‖T_0 - T_δ‖_{S^p}` for `p > 4` by doubling the truncation.
///
/// At each degree `N` of the schedule the windowed sums `W(ρ)` with scales
/// `N/(ρ x_max)`, `ρ ∈ {1, √2, 2}`, are fitted to
/// `L + A ρ^{p/2-2} + B ρ^{p/2-1}`, removing the two leading tail terms;
/// every term used has index at most `N`.
pub fn schatten_limit(delta: f64, p: f64, policy: &TruncationPolicy) -> Result<SchattenLimit> {
    if !(p > 4.0) || !p.is_finite() {
        return Err(Error::Hypothesis(format!(
            "Schatten limits exist only for p > 4 (got {p})"
        )));
    }
    if !(delta.abs() < 1.0) {
        return Err(Error::Hypothesis(format!(
            "T_0 - T_δ is compact only for |δ| < 1 (got {delta})"
        )));
    }
    if policy.start < 4 || policy.max_degree < policy.start {
        return Err(Error::Invalid("truncation policy needs 4 <= start <= max_degree".into()));
    }

    let d = defect_sequence(delta, policy.max_degree)?;
    let terms: Vec<f64> = d
        .iter()
        .enumerate()
        .map(|(n, v)| (2 * n + 1) as f64 * v.abs().powf(p))
        .collect();
    if terms.iter().all(|&t| t == 0.0) {
        let levels = vec![SchattenLevel {
            degree: policy.start,
            direct: 0.0,
            estimate: 0.0,
        }];
        return Ok(SchattenLimit {
            delta,
            p,
            levels,
            relative_change: 0.0,
            relative_tail: 0.0,
            stabilized: true,
            tail_certified: true,
        });
    }

    let windowed = |degree: f64| -> f64 {
        let scale = degree / WINDOW_EXTENT;
        terms[..=degree as usize]
            .iter()
            .enumerate()
            .map(|(n, t)| t * 0.5 * erfc(WINDOW_SLOPE * (n as f64 / scale - WINDOW_CENTER)))
            .sum()
    };
    let rhos = [1.0, std::f64::consts::SQRT_2, 2.0];
    let powers = [0.0, p / 2.0 - 2.0, p / 2.0 - 1.0];
    let fit = nalgebra::Matrix3::from_fn(|i, j| rhos[i].powf(powers[j])).lu();
    let mut prefix = 0.0;
    let mut summed = 0;
    let mut half_window = windowed(policy.start as f64 / 2.0);
    let mut levels: Vec<SchattenLevel> = Vec::new();
    let mut degree = policy.start;
    let (relative_change, relative_tail, stabilized, tail_certified);
    loop {
        prefix += terms[summed..=degree].iter().sum::<f64>();
        summed = degree + 1;
        let n = degree as f64;
        let window = windowed(n);
        let w = nalgebra::Vector3::new(window, windowed(n / rhos[1]), half_window);
        half_window = window;
        let extrapolated = fit.solve(&w).map_or(0.0, |c| c[0].max(0.0));
        let estimate = extrapolated.powf(1.0 / p);
        let change = levels
            .last()
            .map(|l: &SchattenLevel| (estimate - l.estimate).abs() / estimate);
        levels.push(SchattenLevel {
            degree,
            direct: prefix.powf(1.0 / p),
            estimate,
        });
        let tail = schatten_tail_envelope(delta, p, degree) / prefix;
        let stable = change.is_some_and(|c| c < policy.stabilization);
        let certified = tail < policy.tail_tolerance;
        if (stable && certified) || 2 * degree > policy.max_degree {
            relative_change = change.unwrap_or(f64::INFINITY);
            relative_tail = tail;
            stabilized = stable;
            tail_certified = certified;
            break;
        }
        degree *= 2;
    }
    Ok(SchattenLimit {
        delta,
        p,
        levels,
        relative_change,
        relative_tail,
        stabilized,
        tail_certified,
    })
}

/// Least-squares power law `value ≈ constant · δ^exponent`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub p: Exponent,
    pub exponent: f64,
    pub constant: f64,
    pub grid: Vec<(f64, f64)>,
    /// Largest absolute deviation of `log value` from the fitted line.
    pub residual: f64,
}

impl DecayFit {
    /// Smallest `C` with `value <= C δ^exponent` on the whole grid.
    pub fn envelope_constant(&self, exponent: f64) -> f64 {
        self.grid
            .iter()
            .map(|&(d, v)| v / d.powf(exponent))
            .fold(0.0, f64::max)
    }
}

/// Fit `log v = log C + e log δ` by least squares.
pub fn fit_power_law(p: Exponent, grid: Vec<(f64, f64)>) -> Result<DecayFit> {
    let mut distinct: Vec<f64> = grid.iter().map(|g| g.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::Invalid(format!(
            "decay fit needs at least 3 distinct deltas, got {}",
            distinct.len()
        )));
    }
    if let Some(&(d, v)) = grid.iter().find(|g| !(g.1 > 0.0)) {
        return Err(Error::Invalid(format!("nonpositive value {v} at delta {d}")));
    }
    let pts: Vec<(f64, f64)> = grid.iter().map(|&(d, v)| (d.ln(), v.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let residual = pts
        .iter()
        .map(|p| (p.1 - intercept - exponent * p.0).abs())
        .fold(0.0, f64::max);
    Ok(DecayFit {
        p,
        exponent,
        constant: intercept.exp(),
        grid,
        residual,
    })
}

/// Measure `‖T_0 - T_δ‖_{S^p}` on a grid of deltas and fit a power law.
///
/// Finite `p` uses [`schatten_limit`]; `p = ∞` uses [`op_norm_limit`] and
/// its certified value.
pub fn fit_decay(p: Exponent, delta_grid: &[f64], policy: &TruncationPolicy) -> Result<DecayFit> {
    use rayon::prelude::*;
    if let Some(&d) = delta_grid.iter().find(|&&d| !(d > 0.0 && d <= 0.5)) {
        return Err(Error::domain("delta", d, "(0, 1/2]"));
    }
    let values: Vec<f64> = delta_grid
        .par_iter()
        .map(|&d| match p {
            Exponent::Infinity => op_norm_limit(d, policy.max_degree).map(|r| r.certified()),
            Exponent::Finite(p) => schatten_limit(d, p, policy).map(|r| r.value()),
        })
        .collect::<Result<_>>()?;
    fit_power_law(p, delta_grid.iter().copied().zip(values).collect())
}

/// The grid `{1/2, 1/4, ..., 2^-k}`.
pub fn dyadic_delta_grid(k: u32) -> Vec<f64> {
    (1..=k).map(|j| 0.5f64.powi(j as i32)).collect()
}

/// Fourth-power partial sums at the boundary exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceProbe {
    pub delta: f64,
    pub degrees: Vec<usize>,
    /// `Σ_{n<=N} (2n+1) |P_n(δ)|^4` for each probed `N`.
    pub partial_sums: Vec<f64>,
    /// Differences between consecutive partial sums.
    pub increments: Vec<f64>,
}

impl DivergenceProbe {
    pub fn min_increment(&self) -> f64 {
        self.increments.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_increment(&self) -> f64 {
        self.increments.iter().copied().fold(0.0, f64::max)
    }

    pub fn strictly_increasing(&self) -> bool {
        self.increments.iter().all(|&i| i > 0.0)
    }
}

pub fn divergence_probe_p4(delta: f64, degrees: &[usize]) -> Result<DivergenceProbe> {
    let delta = legendre::clamp_abscissa(delta)?;
    let mut sorted = degrees.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let max = sorted.last().copied().unwrap_or(0);
    let mut partial_sums = Vec::with_capacity(sorted.len());
    let mut acc = 0.0;
    let mut next = sorted.iter().peekable();
    for (n, v) in legendre_iter(delta)?.take(max + 1).enumerate() {
        acc += (2 * n + 1) as f64 * v.powi(4);
        while next.peek() == Some(&&n) {
            partial_sums.push(acc);
            next.next();
        }
    }
    let increments = partial_sums.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(DivergenceProbe {
        delta,
        degrees: sorted,
        partial_sums,
        increments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn operator_invariants() {
        let t = SpectralOperator::new(0.3, 100).unwrap();
        assert_eq!(t.eigenvalue(0), 1.0);
        assert!(t.eigenvalues().iter().all(|v| v.abs() <= 1.0));
        assert_eq!(SpectralOperator::multiplicity(7), 15);
        assert_eq!(t.expanded_diagonal().len(), t.dimension());
    }

    #[test]
    fn op_norm_examples() {
        assert_eq!(op_norm_diff(0.0, 50).unwrap().certified(), 0.0);
        let one = op_norm_diff(1.0, 2).unwrap();
        assert_abs_diff_eq!(one.value(), 1.5, epsilon = 1e-15);
        assert!(one.head_dominates);
        assert_abs_diff_eq!(op_norm_diff(1.0, 3000).unwrap().value(), 1.5, epsilon = 1e-15);
        assert!(op_norm_diff(0.04, 500).unwrap().value() <= 0.8);
        assert!(op_norm_diff(0.3, 1).is_err());
    }

    #[test]
    fn schatten_infinity_is_op_norm() {
        let a = schatten_norm_diff(0.3, Exponent::Infinity, 500).unwrap();
        assert_eq!(a, op_norm_diff(0.3, 500).unwrap().value());
    }

    #[test]
    fn schatten_zero_delta() {
        assert_eq!(schatten_norm_diff(0.0, Exponent::Finite(5.0), 100).unwrap(), 0.0);
        let lim = schatten_limit(0.0, 5.0, &TruncationPolicy::default()).unwrap();
        assert_eq!(lim.value(), 0.0);
    }

    #[test]
    fn limit_is_close_to_long_direct_sum_for_large_p() {
        // At p = 12 the direct sum converges fast enough to act as an oracle.
        let direct = schatten_norm_diff(0.25, Exponent::Finite(12.0), 1 << 18).unwrap();
        let policy = TruncationPolicy {
            max_degree: 1 << 14,
            ..Default::default()
        };
        let lim = schatten_limit(0.25, 12.0, &policy).unwrap();
        assert_abs_diff_eq!(lim.value(), direct, epsilon = 1e-9);
    }

    #[test]
    fn limit_hypotheses() {
        let pol = TruncationPolicy::default();
        assert!(matches!(schatten_limit(0.2, 4.0, &pol), Err(Error::Hypothesis(_))));
        assert!(matches!(schatten_limit(1.0, 5.0, &pol), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn exponent_parsing() {
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinity);
        assert_eq!("4.5".parse::<Exponent>().unwrap(), Exponent::Finite(4.5));
        assert!("-1".parse::<Exponent>().is_err());
        assert!("abc".parse::<Exponent>().is_err());
    }

    #[test]
    fn power_law_fit_recovers_exact_law() {
        let grid: Vec<(f64, f64)> = dyadic_delta_grid(8)
            .into_iter()
            .map(|d| (d, 3.0 * d.powf(0.3)))
            .collect();
        let fit = fit_power_law(Exponent::Finite(5.0), grid).unwrap();
        assert_abs_diff_eq!(fit.exponent, 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.constant, 3.0, epsilon = 1e-11);
        assert!(fit.residual < 1e-12);
        assert!(fit_power_law(Exponent::Infinity, vec![(0.5, 1.0), (0.5, 1.0), (0.25, 1.0)]).is_err());
    }

    #[test]
    fn divergence_probe_at_zero_keeps_only_even_degrees() {
        let probe = divergence_probe_p4(0.0, &[0, 1, 2]).unwrap();
        assert_eq!(probe.partial_sums[0], 1.0);
        assert_eq!(probe.partial_sums[1], 1.0);
        assert_abs_diff_eq!(probe.partial_sums[2], 1.0 + 5.0 / 16.0, epsilon = 1e-15);
    }
}
