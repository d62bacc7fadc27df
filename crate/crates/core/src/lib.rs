//! Numerical experiments around strong property (T) for `SL(3, ℝ)`: the
//! circle-averaging operator `T_δ` on `S²`, its Schatten and vector-valued
//! norms, Cartan geometry, zigzag cost ledgers and a concrete unitary
//! representation. See the guide in `book/` for a tour.

// Input guards are written `!(x >= lo)` on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod error;
pub mod legendre;
pub mod report;
pub mod repsim;
pub mod rng;
pub mod schatten;
pub mod sl3;
pub mod spectral;
pub mod sphere;
pub mod zigzag;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/legendre.md")]
    mod legendre {}
    #[doc = include_str!("../../../book/src/spectral.md")]
    mod spectral {}
    #[doc = include_str!("../../../book/src/sphere.md")]
    mod sphere {}
    #[doc = include_str!("../../../book/src/banach.md")]
    mod banach {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/zigzag.md")]
    mod zigzag {}
    #[doc = include_str!("../../../book/src/representation.md")]
    mod representation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
