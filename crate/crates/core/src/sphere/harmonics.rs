//! Real spherical harmonics, orthonormal for the normalized measure.
//!
//! `Y_n^m` for `-n <= m <= n` is stored at index `n² + n + m`. With
//! `ρ = x + i y`,
//!
//! ```text
//! Y_n^0  = Q_n^0(z)
//! Y_n^m  = √2 Q̃_n^m(z) Re ρ^m      (m > 0)
//! Y_n^-m = √2 Q̃_n^m(z) Im ρ^m
//! ```
//!
//! where `Q̃_n^m = Q_n^m / (1 - z²)^{m/2}` obeys the usual three-term
//! recurrence in `n`. Factoring out `(1 - z²)^{m/2}` keeps the evaluation
//! polynomial in Cartesian coordinates, so poles need no special care.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};

use super::quadrature::SphereRule;
use super::Vec3;

/// Number of harmonics of degree `<= band_limit`.
pub fn num_harmonics(band_limit: usize) -> usize {
    (band_limit + 1) * (band_limit + 1)
}

/// Storage index of `Y_n^m`.
pub fn index(n: usize, m: i64) -> usize {
    debug_assert!(m.unsigned_abs() as usize <= n);
    ((n * n + n) as i64 + m) as usize
}

/// Inverse of [`index`].
pub fn degree_order(idx: usize) -> (usize, i64) {
    let n = (idx as f64).sqrt() as usize;
    let n = if (n + 1) * (n + 1) <= idx { n + 1 } else { n };
    (n, idx as i64 - (n * n + n) as i64)
}

/// Write all `Y_n^m(x)` with `n <= band_limit` into `out`.
///
/// `x` should be a unit vector; `out` must have length
/// [`num_harmonics`]`(band_limit)`.
pub fn eval_all(band_limit: usize, x: &Vec3, out: &mut [f64]) {
    assert_eq!(out.len(), num_harmonics(band_limit));
    RECURRENCE.with(|cell| {
        let mut cache = cell.borrow_mut();
        if cache.band_limit < band_limit || cache.a.is_empty() {
            *cache = Recurrence::new(band_limit);
        }
        eval_with(&cache, band_limit, x, out);
    });
}

/// Recurrence coefficients `a_{nm}, b_{nm}` (stored at `index(n, m)`) and
/// the diagonal ratios, so evaluation needs no square roots.
struct Recurrence {
    band_limit: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    diag: Vec<f64>,
}

impl Recurrence {
    fn new(band_limit: usize) -> Self {
        let dim = num_harmonics(band_limit);
        let (mut a, mut b) = (vec![0.0; dim], vec![0.0; dim]);
        let mut diag = vec![1.0; band_limit + 1];
        for m in 0..=band_limit {
            let mf = m as f64;
            if m > 0 {
                diag[m] = ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt();
            }
            for n in m + 1..=band_limit {
                let nf = n as f64;
                a[index(n, m as i64)] = ((4.0 * nf * nf - 1.0) / (nf * nf - mf * mf)).sqrt();
                if n > m + 1 {
                    b[index(n, m as i64)] = ((2.0 * nf + 1.0) * (nf - 1.0 - mf) * (nf - 1.0 + mf)
                        / ((2.0 * nf - 3.0) * (nf * nf - mf * mf)))
                        .sqrt();
                }
            }
        }
        Self {
            band_limit,
            a,
            b,
            diag,
        }
    }
}

thread_local! {
    static RECURRENCE: std::cell::RefCell<Recurrence> = const {
        std::cell::RefCell::new(Recurrence { band_limit: 0, a: Vec::new(), b: Vec::new(), diag: Vec::new() })
    };
}

fn eval_with(rec: &Recurrence, band_limit: usize, x: &Vec3, out: &mut [f64]) {
    let z = x.z;
    let sqrt2 = std::f64::consts::SQRT_2;
    // diagonal start Q̃_m^m and powers of x + iy
    let (mut re, mut im) = (1.0, 0.0);
    let mut diag = 1.0;
    for m in 0..=band_limit {
        if m > 0 {
            diag *= rec.diag[m];
            let (r, i) = (re * x.x - im * x.y, re * x.y + im * x.x);
            re = r;
            im = i;
        }
        let mut prev = 0.0;
        let mut cur = diag;
        for n in m..=band_limit {
            let idx = index(n, m as i64);
            if n > m {
                let next = rec.a[idx] * z * cur - rec.b[idx] * prev;
                prev = cur;
                cur = next;
            }
            if m == 0 {
                out[idx] = cur;
            } else {
                out[idx] = sqrt2 * cur * re;
                out[index(n, -(m as i64))] = sqrt2 * cur * im;
            }
        }
    }
}

/// A single harmonic `Y_n^m(x)`.
pub fn real_harmonic(n: usize, m: i64, x: &Vec3) -> f64 {
    let mut buf = vec![0.0; num_harmonics(n)];
    eval_all(n, x, &mut buf);
    buf[index(n, m)]
}

/// Matrix with rows indexed by nodes and columns by harmonics.
pub fn basis_matrix(band_limit: usize, nodes: &[Vec3]) -> DMatrix<f64> {
    let dim = num_harmonics(band_limit);
    let rows: Vec<f64> = nodes
        .par_iter()
        .flat_map_iter(|x| {
            let mut buf = vec![0.0; dim];
            eval_all(band_limit, x, &mut buf);
            buf
        })
        .collect();
    DMatrix::from_row_slice(nodes.len(), dim, &rows)
}

/// Something that can be evaluated on the sphere and has a finite band limit.
pub trait SphereFunction: Sync {
    fn value(&self, x: &Vec3) -> f64;
    fn band_limit(&self) -> usize;
}

/// A closure tagged with a band limit.
pub struct BandLimited<F> {
    pub band_limit: usize,
    pub f: F,
}

impl<F: Fn(&Vec3) -> f64 + Sync> SphereFunction for BandLimited<F> {
    fn value(&self, x: &Vec3) -> f64 {
        (self.f)(x)
    }

    fn band_limit(&self) -> usize {
        self.band_limit
    }
}

/// A finite expansion `Σ c_{nm} Y_n^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandLimitedFunction {
    band_limit: usize,
    coeffs: Vec<f64>,
}

impl BandLimitedFunction {
    pub fn zeros(band_limit: usize) -> Self {
        Self {
            band_limit,
            coeffs: vec![0.0; num_harmonics(band_limit)],
        }
    }

    pub fn from_coeffs(band_limit: usize, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != num_harmonics(band_limit) {
            return Err(Error::Invalid(format!(
                "band limit {band_limit} needs {} coefficients, got {}",
                num_harmonics(band_limit),
                coeffs.len()
            )));
        }
        Ok(Self { band_limit, coeffs })
    }

    /// `Y_n^m` viewed in the space of band limit `band_limit >= n`.
    pub fn harmonic(band_limit: usize, n: usize, m: i64) -> Result<Self> {
        if n > band_limit || m.unsigned_abs() as usize > n {
            return Err(Error::Invalid(format!(
                "no harmonic (n={n}, m={m}) below band limit {band_limit}"
            )));
        }
        let mut f = Self::zeros(band_limit);
        f.coeffs[index(n, m)] = 1.0;
        Ok(f)
    }

    /// The constant function 1.
    pub fn constant(band_limit: usize) -> Self {
        let mut f = Self::zeros(band_limit);
        f.coeffs[0] = 1.0;
        f
    }

    /// Orthogonal projection of sampled values onto degrees `<= band_limit`,
    /// with inner products computed by `rule`.
    pub fn analyze<R: SphereRule + Sync>(band_limit: usize, rule: &R, samples: &[f64]) -> Self {
        let dim = num_harmonics(band_limit);
        let coeffs = rule
            .nodes()
            .par_iter()
            .zip(rule.weights().par_iter().zip(samples.par_iter()))
            .fold(
                || (vec![0.0; dim], vec![0.0; dim]),
                |(mut acc, mut buf), (x, (w, f))| {
                    eval_all(band_limit, x, &mut buf);
                    let wf = w * f;
                    acc.iter_mut().zip(&buf).for_each(|(a, y)| *a += wf * y);
                    (acc, buf)
                },
            )
            .map(|(acc, _)| acc)
            .reduce(
                || vec![0.0; dim],
                |mut a, b| {
                    a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                    a
                },
            );
        Self { band_limit, coeffs }
    }

    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn coeff(&self, n: usize, m: i64) -> f64 {
        self.coeffs[index(n, m)]
    }

    /// `L²` norm for the normalized measure.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b).sum()
    }

    /// Energy in degree `n`.
    pub fn degree_energy(&self, n: usize) -> f64 {
        self.coeffs[n * n..(n + 1) * (n + 1)].iter().map(|c| c * c).sum()
    }

    /// Samples at the nodes of a rule.
    pub fn samples<R: SphereRule>(&self, rule: &R) -> Vec<f64> {
        rule.nodes().par_iter().map(|x| self.value(x)).collect()
    }

    /// Largest coefficient difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl SphereFunction for BandLimitedFunction {
    fn value(&self, x: &Vec3) -> f64 {
        let mut buf = vec![0.0; self.coeffs.len()];
        eval_all(self.band_limit, x, &mut buf);
        buf.iter().zip(&self.coeffs).map(|(y, c)| y * c).sum()
    }

    fn band_limit(&self) -> usize {
        self.band_limit
    }
}
