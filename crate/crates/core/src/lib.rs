//! Time-dependent XY and XX spin chains with localized impurities.
//!
//! The chain is mapped to free fermions. Its Heisenberg dynamics is carried by
//! a pair of amplitude matrices `(A, B)` that solve a linear flow
//! ([`bvflow`]). Homogeneous chains have a closed form ([`spectral`]); chains
//! with a few impurities reduce to Volterra equations with Bessel kernels
//! ([`volterra`]). Thermal observables follow from Wick contractions
//! ([`observables`]) and every path can be checked against exact
//! diagonalization of small chains ([`fock`]).

pub mod bvflow;
pub mod error;
pub mod fock;
pub mod model;
pub mod observables;
pub mod spectral;
pub mod volterra;

pub use error::{Error, Result};

pub type C64 = num_complex::Complex64;
pub type CMatrix = nalgebra::DMatrix<C64>;

// The guide's code blocks run as doc-tests through these empty modules.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/flow.md")]
    mod flow {}
    #[doc = include_str!("../../../book/src/observables.md")]
    mod observables {}
    #[doc = include_str!("../../../book/src/volterra.md")]
    mod volterra {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
}
