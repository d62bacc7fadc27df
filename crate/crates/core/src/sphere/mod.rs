//! Functions on the unit sphere `S²`: quadrature, real spherical harmonics,
//! the circle-averaging operator and the associated random walk.

pub mod circle;
pub mod harmonics;
pub mod markov;
pub mod quadrature;

pub use circle::{circle_average, circle_average_at, circle_frame};
pub use harmonics::{basis_matrix, eval_all, num_harmonics, real_harmonic, BandLimitedFunction, SphereFunction};
pub use markov::{markov_step, mixing_profile, MarkovTrace, MixingProfile};
pub use quadrature::{gauss_legendre, gauss_legendre_on, PointRule, SphereGrid, SphereRule};

/// Points of `ℝ³`.
pub type Vec3 = nalgebra::Vector3<f64>;
