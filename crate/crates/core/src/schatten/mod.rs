//! Finite-dimensional Banach-space estimates for Schatten-class operators:
//! dyadic decompositions, entropy-number bounds, interpolation bounds and
//! witnessed lower bounds for vector-valued extensions.

pub mod dyadic;
pub mod entropy;
pub mod mixed;

pub use dyadic::{dyadic_decompose, DyadicDecomposition, SingularProfile};
pub use entropy::{combined_vector_bound, entropy_bound, CombinedBound, HolderSplit, TypeCotype};
pub use mixed::{
    interpolation_bound, interpolation_theta, mixed_norm_lower_bound, regular_norm_bound,
    MixedNormEstimate, MixedNormSpace,
};

use nalgebra::DMatrix;

use crate::error::Result;
use crate::spectral::defect_diagonal;

/// Dense diagonal matrix of the truncated `T_0 - T_δ`, each eigenvalue
/// repeated `2n + 1` times.
pub fn defect_matrix(delta: f64, truncation: usize) -> Result<DMatrix<f64>> {
    let d = defect_diagonal(delta, truncation)?;
    Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d)))
}
