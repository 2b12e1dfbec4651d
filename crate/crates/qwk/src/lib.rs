//! Exact-arithmetic engine for genus-expanded quantum correlators at ε = 0,
//! computed from star-product commutators, and for the closed-form Hurwitz
//! correlators they are compared against.
//!
//! Layering, bottom to top:
//!
//! - [`algebra`]: Gaussian rationals and sparse multivariate polynomials that
//!   double as truncated power series.
//! - [`special`]: the series `S(z) = sh(z/2)/(z/2)`, Eulerian polynomials and
//!   power-sum (Ehrhart) convolutions.
//! - [`symbols`]: Fourier symbols of differential polynomials.
//! - [`qkdv`]: Hamiltonian densities and the star-product commutator engine.
//! - [`correlators`]: quantum correlators via nested commutators and the
//!   string equation.
//! - [`hurwitz`]: closed-form Hurwitz correlators and a permutation oracle.
//! - [`identities`]: exact verifiers for the Eulerian/hyperbolic identities.
//! - [`suites`]: verification grids shared by the CLI and the test suite.

pub mod algebra;
pub mod correlators;
pub mod hurwitz;
pub mod identities;
pub mod qkdv;
pub mod special;
pub mod suites;
pub mod symbols;

mod error;

pub use error::{Error, Result};
