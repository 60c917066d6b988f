//! Exact local densities of hermitian lattices over a ramified quadratic
//! extension `F/F_0` of a `p`-adic field, `p` odd.
//!
//! The crate is layered bottom-up:
//!
//! - [`q_combinatorics`]: Gaussian binomials and q-series identities.
//! - [`fq_spaces`]: quadratic spaces over `F_q` and their counting functions.
//! - [`hermitian_lattice`]: genus symbols, exact Gram arithmetic, overlattices, coset counts.
//! - [`local_density`]: density polynomials, derived densities and `∂Den`.
//! - [`identity_lab`]: the polynomial families `f`, `h`, `g`, `F` and their identities.
//! - [`oracle`]: brute-force counting of form-preserving maps over truncated rings.
//! - [`fourier_checks`]: horizontal lattices, vertical parts and the finite D-sum.
//! - [`suites`]: named verification suites shared by the CLI and the tests.

pub mod arith;
pub mod error;
pub mod fourier_checks;
pub mod fq_spaces;
pub mod hermitian_lattice;
pub mod identity_lab;
pub mod local_density;
pub mod oracle;
pub mod poly;
pub mod q_combinatorics;
pub mod suites;

pub use error::{Error, Result};
pub use poly::Poly;
pub use q_combinatorics::QValue;
