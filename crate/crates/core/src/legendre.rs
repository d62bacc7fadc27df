//! Legendre polynomials on `[-1, 1]`.
//!
//! Values come from the three-term (Bonnet) recurrence
//!
//! ```text
//! (n + 1) P_{n+1}(x) = (2n + 1) x P_n(x) - n P_{n-1}(x),
//! ```
//!
//! which is stable in the forward direction on the whole interval. Besides
//! point evaluation the module provides a streaming iterator for long sweeps,
//! the uniform Hölder bound `|P_n(0) - P_n(δ)| <= 4 sqrt|δ|` and the Bernstein
//! envelope used to certify truncated sums.

use crate::error::{Error, Result};

/// Inputs within this distance outside `[-1, 1]` are clamped.
pub const DOMAIN_SLACK: f64 = 1e-12;

/// Constant in the uniform Hölder bound `|P_n(0) - P_n(δ)| <= C sqrt|δ|`.
pub const HOLDER_CONSTANT: f64 = 4.0;

/// Validate an abscissa, clamping round-off overshoot at the endpoints.
pub fn clamp_abscissa(x: f64) -> Result<f64> {
    if !x.is_finite() || x.abs() > 1.0 + DOMAIN_SLACK {
        return Err(Error::domain("x", x, "[-1, 1]"));
    }
    Ok(x.clamp(-1.0, 1.0))
}

/// Iterator over `P_0(x), P_1(x), P_2(x), ...`.
///
/// The iterator never ends; combine it with `take`.
#[derive(Debug, Clone)]
pub struct LegendreIter {
    x: f64,
    n: usize,
    prev: f64,
    cur: f64,
}

impl Iterator for LegendreIter {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let out = self.cur;
        let n = self.n as f64;
        let next = if self.n == 0 {
            self.x
        } else {
            ((2.0 * n + 1.0) * self.x * self.cur - n * self.prev) / (n + 1.0)
        };
        self.prev = self.cur;
        self.cur = next;
        self.n += 1;
        Some(out)
    }
}

/// Stream Legendre values at `x`.
///
/// ```
/// let p: Vec<f64> = sl3t::legendre::legendre_iter(0.5).unwrap().take(3).collect();
/// assert_eq!(p, vec![1.0, 0.5, -0.125]);
/// ```
pub fn legendre_iter(x: f64) -> Result<LegendreIter> {
    let x = clamp_abscissa(x)?;
    Ok(LegendreIter {
        x,
        n: 0,
        prev: 0.0,
        cur: 1.0,
    })
}

/// `P_n(x)` by forward recurrence.
pub fn legendre_eval(n: usize, x: f64) -> Result<f64> {
    Ok(legendre_iter(x)?.nth(n).expect("infinite iterator"))
}

/// `P_n(x)` and `P_n'(x)` together, for Newton iterations.
pub(crate) fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for k in 1..n {
        let k = k as f64;
        let p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = if (1.0 - x * x).abs() < 1e-300 {
        // endpoint value n(n+1)/2 with the sign of x^{n+1}
        let s = if x > 0.0 || n % 2 == 1 { 1.0 } else { -1.0 };
        s * nf * (nf + 1.0) / 2.0
    } else {
        nf * (x * p1 - p0) / (x * x - 1.0)
    };
    (p1, dp)
}

/// Table of `P_0(x), ..., P_N(x)` at a fixed abscissa.
#[derive(Debug, Clone, PartialEq)]
pub struct LegendreTable {
    x: f64,
    values: Vec<f64>,
}

impl LegendreTable {
    pub fn new(max_degree: usize, x: f64) -> Result<Self> {
        let values = legendre_iter(x)?.take(max_degree + 1).collect();
        Ok(Self {
            x: clamp_abscissa(x)?,
            values,
        })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn max_degree(&self) -> usize {
        self.values.len() - 1
    }

    /// `P_n(x)`; panics if `n` exceeds the table.
    pub fn get(&self, n: usize) -> f64 {
        self.values[n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// `|P_n(0) - P_n(δ)|`, the quantity controlled by [`HOLDER_CONSTANT`].
pub fn holder_defect(n: usize, delta: f64) -> Result<f64> {
    let delta = clamp_abscissa(delta)?;
    Ok((legendre_eval(n, 0.0)? - legendre_eval(n, delta)?).abs())
}

/// `C sqrt|δ|`.
pub fn holder_bound(delta: f64) -> f64 {
    HOLDER_CONSTANT * delta.abs().sqrt()
}

/// Bernstein envelope `sqrt(2 / (π n sin θ))`, an upper bound for
/// `|P_n(cos θ)|` when `n >= 1` and `0 < θ < π`.
pub fn bernstein_envelope(n: usize, theta: f64) -> f64 {
    let s = theta.sin();
    if n == 0 || s <= 0.0 {
        return f64::INFINITY;
    }
    (2.0 / (std::f64::consts::PI * n as f64 * s)).sqrt()
}

/// Envelope for `|P_n(x)|` written in terms of `x = cos θ`.
pub fn bernstein_envelope_at(n: usize, x: f64) -> f64 {
    let s = (1.0 - x * x).max(0.0).sqrt();
    if n == 0 || s == 0.0 {
        return f64::INFINITY;
    }
    (2.0 / (std::f64::consts::PI * n as f64 * s)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn closed_forms() {
        for &x in &[-1.0, -0.7, 0.0, 0.3, 0.9, 1.0] {
            let p: Vec<f64> = legendre_iter(x).unwrap().take(5).collect();
            assert_abs_diff_eq!(p[2], 0.5 * (3.0 * x * x - 1.0), epsilon = 1e-15);
            assert_abs_diff_eq!(p[3], 0.5 * (5.0 * x * x * x - 3.0 * x), epsilon = 1e-15);
            let x2 = x * x;
            assert_abs_diff_eq!(p[4], (35.0 * x2 * x2 - 30.0 * x2 + 3.0) / 8.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn endpoints_and_parity() {
        for n in 0..200 {
            assert_abs_diff_eq!(legendre_eval(n, 1.0).unwrap(), 1.0, epsilon = 1e-12);
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert_abs_diff_eq!(legendre_eval(n, -1.0).unwrap(), sign, epsilon = 1e-12);
        }
    }

    #[test]
    fn central_values_match_double_factorial_formula() {
        // P_{2m}(0) = (-1)^m (2m-1)!! / (2m)!!
        let mut expected = 1.0;
        for m in 0..300usize {
            if m > 0 {
                expected *= -((2 * m - 1) as f64) / ((2 * m) as f64);
            }
            assert_abs_diff_eq!(legendre_eval(2 * m, 0.0).unwrap(), expected, epsilon = 1e-14);
            assert_eq!(legendre_eval(2 * m + 1, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn slack_is_clamped_and_outside_rejected() {
        assert!(legendre_eval(3, 1.0 + 1e-13).is_ok());
        assert!(matches!(legendre_eval(3, 1.01), Err(Error::Domain { .. })));
        assert!(legendre_eval(3, f64::NAN).is_err());
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for n in 1..20 {
            for &x in &[-0.8, -0.1, 0.4, 0.95] {
                let (_, d) = legendre_with_derivative(n, x);
                let h = 1e-6;
                let fd = (legendre_eval(n, x + h).unwrap() - legendre_eval(n, x - h).unwrap()) / (2.0 * h);
                assert_abs_diff_eq!(d, fd, epsilon = 1e-5 * (n * n) as f64);
            }
        }
    }

    #[test]
    fn table_matches_pointwise() {
        let t = LegendreTable::new(50, 0.37).unwrap();
        assert_eq!(t.max_degree(), 50);
        assert_eq!(t.get(17), legendre_eval(17, 0.37).unwrap());
    }
}
