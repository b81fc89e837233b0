//! Spectral toolkit for the quadratic operator pencil
//! `T(λ) = -Δ + q + 2λa + λ²` of the damped wave equation
//! `u_tt + 2a(x)u_t = (Δ - q(x))u` with unbounded damping.
//!
//! The crate is organised bottom-up:
//!
//! - [`oscillator`]: real spectra of `-d²/dx² + x^{2n}` (Sturm bisection on a
//!   finite-difference grid with Richardson extrapolation), the exact Dirichlet
//!   spectrum of an interval and the Weyl law.
//! - [`poly`] and [`dispersion`]: the algebraic characteristic equations whose
//!   roots are the non-real eigenvalues on the line and on the strip.
//! - [`banded`] and [`verify`]: a direct grid discretisation of the pencil used
//!   to confirm those roots independently (smallest singular values, nonlinear
//!   inverse iteration, argument-principle counts).
//! - [`quasimodes`]: WKB singular sequences witnessing the essential spectrum
//!   `(-∞, 0]`.
//! - [`convergence`]: eigenvalue branches as the damping exponent grows.
//! - [`export`]: spectrum pipelines and plot-ready data.

pub mod banded;
pub mod convergence;
pub mod dispersion;
mod error;
pub mod export;
pub mod oscillator;
pub mod poly;
pub mod quadrature;
pub mod quasimodes;
pub mod verify;

pub use error::{Error, ErrorKind, Result};
pub use num_complex::Complex64;

/// Version string carried in exported metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
