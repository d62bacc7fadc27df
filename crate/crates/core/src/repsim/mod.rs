//! A concrete unitary representation of `SL(3, ℝ)`: the quasi-regular
//! action on `L²(S²)`, truncated to a band limit.
//!
//! The representation has no invariant vectors, so its `K`-biinvariant
//! coefficient must decay with the length of `g`; [`coefficient_decay`]
//! checks that decay against `4 e^{-n/2}`. [`invariant_gap`] checks the
//! separation of the `U`- and `Ũ`-invariant lines in each irreducible of
//! `SO(3)`.

pub mod coefficient;
pub mod gap;
pub mod graded;
pub mod quasi_regular;

pub use coefficient::{coefficient_decay, empirical_exponent, gaussian_moment_oracle, k_biinvariant_coefficient, DecayRow};
pub use gap::{invariant_gap, InvariantGap};
pub use graded::{graded_rule, GradedProduct, GradedSpec};
pub use quasi_regular::{
    group_law_defect, k_average_projection, k_averaged_operator, operator_sample, quasi_regular_apply, Applied,
    RepOperatorSample,
};
