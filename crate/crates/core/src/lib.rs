//! Verification toolkit for the rationality of Eisenstein cohomology of
//! degenerate principal series on `GL_n` over CM fields: Weyl and Kostant
//! combinatorics, constant-term L-factor algebra, archimedean intertwining
//! integrals, CM-field discriminants and Galois signs, and the end-to-end
//! diagram checks.
//!
//! Floating-point code is generic over [`scalar::Real`]; the aliases below
//! fix it to `f64`.

pub mod cmfield;
pub mod error;
pub mod intertwine;
pub mod kostant;
pub mod lchar;
pub mod rationality;
pub mod scalar;
pub mod weyl;

pub use error::{Error, Result};

/// Quadrature estimate in double precision.
pub type Estimate = intertwine::Estimate<f64>;
/// Complex double.
pub type Complex = num_complex::Complex<f64>;

/// [`intertwine::intertwine_numeric`] in double precision.
pub fn intertwine_numeric(
    k: usize,
    n: usize,
    data: &intertwine::LocalCharData,
    beta: &intertwine::Composition,
    quad: &intertwine::QuadratureConfig,
) -> Result<Estimate> {
    intertwine::intertwine_numeric::<f64>(k, n, data, beta, quad)
}
