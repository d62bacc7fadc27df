//! Product rules in `(z, φ)` graded toward the peak of `‖a⁻¹x‖^{-3/2}`.
//!
//! For `a = diag(e^{a1}, e^{a2}, e^{a3})` the cocycle concentrates around
//! `±e1` with width `e^{-(a1-a3)}` in `z` and `e^{-(a1-a2)}` in the
//! longitude `φ`. Panels start at an eighth of that width and double
//! until they reach a cap, then stay uniform; each panel carries a
//! Gauss–Legendre rule.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::sl3::LambdaPoint;
use crate::sphere::{gauss_legendre_on, PointRule, Vec3};

/// Panel edges on `[0, r]`: `0, h, 2h, 4h, …` while a panel is no wider
/// than `cap`, then equal panels of width `<= cap`.
pub fn graded_edges(r: f64, h: f64, cap: f64) -> Vec<f64> {
    let mut edges = vec![0.0];
    let mut e = h.min(cap).min(r);
    edges.push(e);
    while e < r && e <= cap && 2.0 * e < r {
        e *= 2.0;
        edges.push(e);
    }
    let last = *edges.last().expect("nonempty");
    let rest = r - last;
    if rest > 0.0 {
        let k = (rest / cap).ceil().max(1.0) as usize;
        for i in 1..=k {
            edges.push(if i == k { r } else { last + rest * i as f64 / k as f64 });
        }
    }
    edges
}

fn split(edges: &[f64], refine: u32) -> Vec<f64> {
    let parts = 1usize << refine;
    let mut out = vec![edges[0]];
    for w in edges.windows(2) {
        for i in 1..=parts {
            out.push(w[0] + (w[1] - w[0]) * i as f64 / parts as f64);
        }
    }
    out
}

fn composite(edges: &[f64], order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = Vec::new();
    let mut w = Vec::new();
    for e in edges.windows(2) {
        let (px, pw) = gauss_legendre_on(e[0], e[1], order);
        x.extend(px);
        w.extend(pw);
    }
    (x, w)
}

/// Sizes of a graded rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradedSpec {
    /// Gauss–Legendre nodes per panel.
    pub order: usize,
    /// Each panel is split into `2^refine` before placing nodes.
    pub refine: u32,
    pub z_cap: f64,
    pub phi_cap: f64,
}

impl GradedSpec {
    /// Order `L + 1` (at least 8); the longitude cap keeps
    /// `2L · width / 2` below a third of the order so trigonometric
    /// products of degree `2L` are integrated to near machine precision.
    pub fn for_band_limit(band_limit: usize) -> Self {
        let order = (band_limit + 1).max(8);
        Self {
            order,
            refine: 0,
            z_cap: 0.5,
            phi_cap: (order as f64 / (3.0 * band_limit.max(1) as f64)).min(0.5),
        }
    }

    pub fn refined(self) -> Self {
        Self {
            refine: self.refine + 1,
            ..self
        }
    }
}

/// The tensor factors of a graded rule; nodes are generated on the fly.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedProduct {
    z: (Vec<f64>, Vec<f64>),
    phi: (Vec<f64>, Vec<f64>),
}

impl GradedProduct {
    pub fn new(a: &LambdaPoint, spec: &GradedSpec) -> Self {
        let hz = (-(a.a1 - a.a3)).exp().min(1.0) / 8.0;
        let hp = (-(a.a1 - a.a2)).exp().min(1.0) / 8.0;

        let half_z = split(&graded_edges(1.0, hz, spec.z_cap), spec.refine);
        let mut z_edges: Vec<f64> = half_z.iter().rev().map(|e| -e).collect();
        z_edges.extend_from_slice(&half_z[1..]);

        // panels mirrored around φ = 0 and φ = π, covering [-π/2, 3π/2]
        let half_p = split(&graded_edges(FRAC_PI_2, hp, spec.phi_cap), spec.refine);
        let mut p_edges: Vec<f64> = half_p.iter().rev().map(|e| -e).collect();
        p_edges.extend_from_slice(&half_p[1..]);
        p_edges.extend(half_p.iter().rev().skip(1).map(|e| PI - e));
        p_edges.extend(half_p[1..].iter().map(|e| PI + e));

        Self {
            z: composite(&z_edges, spec.order),
            phi: composite(&p_edges, spec.order),
        }
    }

    pub fn len(&self) -> usize {
        self.z.0.len() * self.phi.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Visit every node with its weight (normalized measure).
    pub fn for_each(&self, mut f: impl FnMut(&Vec3, f64)) {
        let norm = 1.0 / (4.0 * PI);
        let trig: Vec<(f64, f64)> = self.phi.0.iter().map(|p| p.sin_cos()).collect();
        for (z, wz) in self.z.0.iter().zip(&self.z.1) {
            let r = (1.0 - z * z).max(0.0).sqrt();
            for ((s, c), wp) in trig.iter().zip(&self.phi.1) {
                f(&Vec3::new(r * c, r * s, *z), wz * wp * norm);
            }
        }
    }

    pub fn integrate(&self, f: impl Fn(&Vec3) -> f64) -> f64 {
        let mut total = 0.0;
        self.for_each(|x, w| total += w * f(x));
        total
    }
}

/// The graded rule for `a` as explicit nodes, normalized to total weight 1.
pub fn graded_rule(a: &LambdaPoint, spec: &GradedSpec) -> PointRule {
    let prod = GradedProduct::new(a, spec);
    let mut nodes = Vec::with_capacity(prod.len());
    let mut weights = Vec::with_capacity(prod.len());
    prod.for_each(|x, w| {
        nodes.push(*x);
        weights.push(w);
    });
    PointRule::new(nodes, weights).expect("matching lengths")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::{real_harmonic, SphereRule};
    use approx::assert_abs_diff_eq;

    #[test]
    fn edges_cover_interval() {
        let e = graded_edges(1.0, 1e-3, 0.25);
        assert_eq!(e[0], 0.0);
        assert_eq!(*e.last().unwrap(), 1.0);
        assert!(e.windows(2).all(|w| w[1] > w[0] && w[1] - w[0] <= 0.25 + 1e-15));
        assert_eq!(graded_edges(1.0, 0.5, 0.25).len(), 5);
    }

    #[test]
    fn longitude_edges_span_full_circle() {
        let a = LambdaPoint::new(2.0, 0.5, -2.5).unwrap();
        let rule = graded_rule(&a, &GradedSpec::for_band_limit(4));
        assert_abs_diff_eq!(rule.weights().iter().sum::<f64>(), 1.0, epsilon = 1e-13);
    }

    #[test]
    fn integrates_harmonic_products() {
        let a = LambdaPoint::new(3.0, -1.0, -2.0).unwrap();
        let rule = graded_rule(&a, &GradedSpec::for_band_limit(10));
        for &(n, m, n2, m2) in &[(3, 2, 3, 2), (7, -5, 7, -5), (4, 1, 6, 1), (10, 10, 10, -10)] {
            let v = rule.integrate(|x| real_harmonic(n, m, x) * real_harmonic(n2, m2, x));
            let exact = if (n, m) == (n2, m2) { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(v, exact, epsilon = 1e-12);
        }
    }
}
