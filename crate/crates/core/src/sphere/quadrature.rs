//! Gauss–Legendre rules and product quadrature on the sphere.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::legendre::legendre_with_derivative;

use super::Vec3;

/// Nodes (ascending) and weights of the `n`-point Gauss–Legendre rule on
/// `[-1, 1]`. Exact for polynomials of degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(a: f64, b: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let (c, h) = ((a + b) / 2.0, (b - a) / 2.0);
    (
        x.iter().map(|t| c + h * t).collect(),
        w.iter().map(|w| w * h).collect(),
    )
}

/// A quadrature rule for the normalized surface measure on `S²`.
pub trait SphereRule {
    fn nodes(&self) -> &[Vec3];
    fn weights(&self) -> &[f64];

    fn len(&self) -> usize {
        self.nodes().len()
    }

    fn is_empty(&self) -> bool {
        self.nodes().is_empty()
    }

    fn integrate<F: Fn(&Vec3) -> f64>(&self, f: F) -> f64
    where
        Self: Sized,
    {
        self.nodes()
            .iter()
            .zip(self.weights())
            .map(|(x, w)| w * f(x))
            .sum()
    }

    /// `Σ w_i a_i b_i` for sample vectors on this rule.
    fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        self.weights()
            .iter()
            .zip(a.iter().zip(b))
            .map(|(w, (x, y))| w * x * y)
            .sum()
    }
}

/// Gauss–Legendre in `z` times uniform longitudes.
///
/// With `L + 1` latitudes and `2L + 1` longitudes the rule integrates every
/// polynomial of degree `<= 2L` exactly, so products of two harmonics of
/// degree `<= L` are exact. Nodes are stored latitude-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    band_limit: usize,
    z: Vec<f64>,
    n_lon: usize,
    nodes: Vec<Vec3>,
    weights: Vec<f64>,
}

impl SphereGrid {
    /// Grid exact for products of harmonics of degree `<= band_limit`.
    pub fn new(band_limit: usize) -> Self {
        Self::with_sizes(band_limit + 1, 2 * band_limit + 1).expect("sizes are positive")
    }

    /// Grid with explicit sizes; `band_limit` is the largest `L` with
    /// `n_lat >= L + 1` and `n_lon >= 2L + 1`.
    pub fn with_sizes(n_lat: usize, n_lon: usize) -> Result<Self> {
        if n_lat == 0 || n_lon == 0 {
            return Err(Error::Invalid("sphere grid needs positive sizes".into()));
        }
        let band_limit = (n_lat - 1).min((n_lon - 1) / 2);
        let (z, wz) = gauss_legendre(n_lat);
        let mut nodes = Vec::with_capacity(n_lat * n_lon);
        let mut weights = Vec::with_capacity(n_lat * n_lon);
        for (zi, wi) in z.iter().zip(&wz) {
            let r = (1.0 - zi * zi).max(0.0).sqrt();
            for j in 0..n_lon {
                let phi = 2.0 * PI * j as f64 / n_lon as f64;
                nodes.push(Vec3::new(r * phi.cos(), r * phi.sin(), *zi));
                weights.push(wi / (2.0 * n_lon as f64));
            }
        }
        Ok(Self {
            band_limit,
            z,
            n_lon,
            nodes,
            weights,
        })
    }

    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    pub fn n_lat(&self) -> usize {
        self.z.len()
    }

    pub fn n_lon(&self) -> usize {
        self.n_lon
    }

    pub fn latitudes(&self) -> &[f64] {
        &self.z
    }

    /// Sample `f` at every node.
    pub fn sample<F: Fn(&Vec3) -> f64 + Sync>(&self, f: F) -> Vec<f64> {
        use rayon::prelude::*;
        self.nodes.par_iter().map(&f).collect()
    }
}

impl SphereRule for SphereGrid {
    fn nodes(&self) -> &[Vec3] {
        &self.nodes
    }

    fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// A rule given by explicit nodes and weights.
#[derive(Debug, Clone, PartialEq)]
pub struct PointRule {
    nodes: Vec<Vec3>,
    weights: Vec<f64>,
}

impl PointRule {
    pub fn new(nodes: Vec<Vec3>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(Error::Invalid("nodes and weights differ in length".into()));
        }
        Ok(Self { nodes, weights })
    }
}

impl SphereRule for PointRule {
    fn nodes(&self) -> &[Vec3] {
        &self.nodes
    }

    fn weights(&self) -> &[f64] {
        &self.weights
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gauss_legendre_integrates_monomials() {
        for n in 1..40 {
            let (x, w) = gauss_legendre(n);
            for k in 0..(2 * n) {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k as i32)).sum();
                let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k + 1) as f64 };
                assert_abs_diff_eq!(q, exact, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn nodes_are_sorted_and_symmetric() {
        let (x, w) = gauss_legendre(101);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
        for i in 0..101 {
            assert_abs_diff_eq!(x[i], -x[100 - i], epsilon = 1e-15);
            assert_abs_diff_eq!(w[i], w[100 - i], epsilon = 1e-15);
        }
    }

    #[test]
    fn grid_invariants() {
        let g = SphereGrid::new(16);
        assert_eq!(g.band_limit(), 16);
        assert_eq!(g.len(), 17 * 33);
        assert_abs_diff_eq!(g.weights().iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        assert!(g.weights().iter().all(|&w| w > 0.0));
        assert!(g.nodes().iter().all(|x| (x.norm() - 1.0).abs() < 1e-12));
        // ∫ z² dσ = 1/3, ∫ x⁴ dσ = 1/5
        assert_abs_diff_eq!(g.integrate(|x| x.z * x.z), 1.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(g.integrate(|x| x.x.powi(4)), 0.2, epsilon = 1e-14);
    }

    #[test]
    fn mapped_rule() {
        let (x, w) = gauss_legendre_on(1.0, 3.0, 5);
        let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x * x).sum();
        assert_abs_diff_eq!(q, 26.0 / 3.0, epsilon = 1e-13);
    }
}
