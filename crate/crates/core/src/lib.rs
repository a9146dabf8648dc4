//! Spectral-domain limit theory for Fejer graph integrals and Toeplitz traces.
//!
//! The crate is organized around the pipeline
//! graph/matroid combinatorics -> kernel analysis -> Fejer integrals and
//! Szego-type trace limits -> diagram-formula cumulants -> simulated linear
//! processes -> minimum-contrast spectral estimation. Everything here is a
//! pure function of its inputs; IO, file formats, and the CLI live in the
//! companion crate.
//!
//! The crate is `no_std` (with `alloc`): all float math goes through `libm`
//! and randomness is injected as explicit seeds.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
#[macro_use]
extern crate std;

pub mod estimation;
pub mod fejer;
pub mod graphs;
pub mod kernels;
pub mod numeric;
pub mod processes;
pub mod special;
pub mod wick;

/// Where the spectral variables live: the unit-measure torus `[-pi, pi)` with
/// sums over integer frequencies, or the real line with Lebesgue integrals.
/// Limit normalizations and integrability conditions differ between the two.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectralDomain {
    Torus,
    Line,
}

/// Crate version, re-exported so downstream artifacts can record it.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exact rational scalar used throughout the combinatorial layer.
pub type Rat = num_rational::Ratio<i64>;

/// Wide rational used where intermediate products can overflow `i64`.
pub type BigRat = num_rational::BigRational;

pub use num_complex::Complex64;

/// Promotes a machine rational to the arbitrary-precision representation.
pub fn to_big(r: Rat) -> BigRat {
    BigRat::new((*r.numer()).into(), (*r.denom()).into())
}
