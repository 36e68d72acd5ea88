//! Spectral pairs for finite integer sets, unions of unit intervals and
//! invariant measures of affine iterated function systems.
//!
//! Exact results (orthogonality certificates, tilings, decompositions) are
//! computed with rational arithmetic and cyclotomic divisibility. Statements
//! about infinite spectra are backed by Parseval partial sums.

pub mod error;
pub mod exact;
pub mod finite;
pub mod ifs;
pub mod interval;
pub mod multidim;
pub mod validation;

pub use error::{Error, Result};
pub use exact::{delta_hat, mask_poly, vanishing_sum, IntegerSet, MaskPolynomial, Rational};
