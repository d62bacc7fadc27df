//! The circle-averaging operator `T_δ`.
//!
//! `(T_δ f)(x)` is the mean of `f` over the circle `{y : ⟨x, y⟩ = δ}`. The
//! circle is parametrized as `δ x + √(1-δ²)(cos φ u_x + sin φ v_x)` where
//! `u_x = normalize(e_k × x)` for the coordinate axis `e_k` least aligned
//! with `x` (lowest index on ties) and `v_x = x × u_x`. The `M`-point
//! trapezoid rule in `φ` is exact for band limit `L` once `M >= 2L + 1`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::legendre::clamp_abscissa;

use super::harmonics::{eval_all, num_harmonics, BandLimitedFunction, SphereFunction};
use super::quadrature::{SphereGrid, SphereRule};
use super::Vec3;

/// Orthonormal pair `(u, v)` completing `x` to a right-handed frame.
pub fn circle_frame(x: &Vec3) -> (Vec3, Vec3) {
    let a = x.abs();
    let k = if a.x <= a.y && a.x <= a.z {
        0
    } else if a.y <= a.z {
        1
    } else {
        2
    };
    let u = Vec3::ith(k, 1.0).cross(x).normalize();
    let v = x.cross(&u);
    (u, v)
}

/// The `M` equispaced points of the circle at inner product `δ` from `x`.
pub fn circle_points(x: &Vec3, delta: f64, m: usize) -> impl Iterator<Item = Vec3> + '_ {
    let (u, v) = circle_frame(x);
    let r = (1.0 - delta * delta).max(0.0).sqrt();
    (0..m).map(move |j| {
        let phi = 2.0 * PI * j as f64 / m as f64;
        delta * x + r * (phi.cos() * u + phi.sin() * v)
    })
}

fn check(delta: f64, band_limit: usize, m: usize) -> Result<f64> {
    let delta = clamp_abscissa(delta).map_err(|_| Error::domain("delta", delta, "[-1, 1]"))?;
    if m < 2 * band_limit + 1 {
        return Err(Error::Quadrature(format!(
            "{m} circle points cannot resolve band limit {band_limit} (need {})",
            2 * band_limit + 1
        )));
    }
    Ok(delta)
}

/// `(T_δ f)(x)` at a single point.
pub fn circle_average_at<F: SphereFunction>(f: &F, delta: f64, m: usize, x: &Vec3) -> Result<f64> {
    let delta = check(delta, f.band_limit(), m)?;
    Ok(circle_points(x, delta, m).map(|y| f.value(&y)).sum::<f64>() / m as f64)
}

/// Samples of `T_δ f` at the nodes of `grid`.
pub fn circle_average<F: SphereFunction>(
    f: &F,
    delta: f64,
    m: usize,
    grid: &SphereGrid,
) -> Result<Vec<f64>> {
    let delta = check(delta, f.band_limit(), m)?;
    Ok(grid
        .nodes()
        .par_iter()
        .map(|x| circle_points(x, delta, m).map(|y| f.value(&y)).sum::<f64>() / m as f64)
        .collect())
}

/// `T_δ f` as a band-limited expansion; `T_δ` preserves every degree, so
/// analysis on a grid of the same band limit is exact.
pub fn circle_average_function(
    f: &BandLimitedFunction,
    delta: f64,
    m: usize,
) -> Result<BandLimitedFunction> {
    let grid = SphereGrid::new(f.band_limit());
    let samples = circle_average(f, delta, m, &grid)?;
    Ok(BandLimitedFunction::analyze(f.band_limit(), &grid, &samples))
}

/// `T_δ Y_n^m` for every harmonic of degree `<= band_limit`, sampled at
/// `nodes`: row `i`, column `index(n, m)`.
pub fn circle_average_basis(
    band_limit: usize,
    delta: f64,
    m: usize,
    nodes: &[Vec3],
) -> Result<DMatrix<f64>> {
    let delta = check(delta, band_limit, m)?;
    let dim = num_harmonics(band_limit);
    let rows: Vec<f64> = nodes
        .par_iter()
        .flat_map_iter(|x| {
            let mut acc = vec![0.0; dim];
            let mut buf = vec![0.0; dim];
            for y in circle_points(x, delta, m) {
                eval_all(band_limit, &y, &mut buf);
                acc.iter_mut().zip(&buf).for_each(|(a, b)| *a += b);
            }
            acc.iter_mut().for_each(|a| *a /= m as f64);
            acc
        })
        .collect();
    Ok(DMatrix::from_row_slice(nodes.len(), dim, &rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::harmonics::{basis_matrix, BandLimited};
    use approx::assert_abs_diff_eq;

    #[test]
    fn frame_is_orthonormal() {
        for x in [
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.6, 0.0, -0.8),
            Vec3::new(0.36, 0.48, 0.8),
        ] {
            let (u, v) = circle_frame(&x);
            assert_abs_diff_eq!(u.norm(), 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(v.norm(), 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(u.dot(&x), 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(v.dot(&u), 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(u.cross(&v).dot(&x), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn constant_is_fixed() {
        let one = BandLimited { band_limit: 0, f: |_: &Vec3| 1.0 };
        let grid = SphereGrid::new(4);
        for v in circle_average(&one, 0.3, 5, &grid).unwrap() {
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn too_few_points_rejected() {
        let f = BandLimitedFunction::harmonic(5, 5, 2).unwrap();
        assert!(matches!(
            circle_average_at(&f, 0.2, 10, &Vec3::z()),
            Err(Error::Quadrature(_))
        ));
        assert!(circle_average_at(&f, 1.5, 11, &Vec3::z()).is_err());
    }

    #[test]
    fn independent_of_frame_rotation() {
        // Rotating (u, v) within the plane shifts φ; the trapezoid rule is
        // exact, so the average cannot change.
        let f = BandLimitedFunction::harmonic(6, 6, -3).unwrap();
        let x = Vec3::new(0.2, -0.3, 0.5).normalize();
        let (u, v) = circle_frame(&x);
        let delta: f64 = 0.4;
        let r = (1.0 - delta * delta).sqrt();
        let m = 13;
        let shifted: f64 = (0..m)
            .map(|j| {
                let phi = 2.0 * PI * (j as f64 + 0.37) / m as f64;
                f.value(&(delta * x + r * (phi.cos() * u + phi.sin() * v)))
            })
            .sum::<f64>()
            / m as f64;
        assert_abs_diff_eq!(circle_average_at(&f, delta, m, &x).unwrap(), shifted, epsilon = 1e-12);
    }

    #[test]
    fn basis_version_matches_pointwise() {
        let l = 5;
        let grid = SphereGrid::new(l);
        let avg = circle_average_basis(l, 0.35, 11, grid.nodes()).unwrap();
        let f = BandLimitedFunction::harmonic(l, 4, -1).unwrap();
        let direct = circle_average(&f, 0.35, 11, &grid).unwrap();
        let col = avg.column(crate::sphere::harmonics::index(4, -1));
        for (a, b) in col.iter().zip(&direct) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-13);
        }
        assert_eq!(basis_matrix(l, grid.nodes()).shape(), avg.shape());
    }
}
