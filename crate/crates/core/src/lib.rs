//! Numerical toolkit for balayage-based non-uniform sampling.
//!
//! Spectra are compact convex symmetric sets in frequency space
//! ([`geometry`]); sampling sets are finite point clouds in time space
//! ([`sampling`]); bandlimited signals are stored by their spectral values on
//! a quadrature grid ([`spectral`]). On top of these sit the balayage solver
//! ([`balayage`]), Fourier frame estimation and reconstruction ([`frames`]),
//! short-time Fourier and Gabor machinery ([`stft`]) and pseudo-differential
//! operators ([`psido`]).
//!
//! Fourier convention: `f̂(γ) = ∫ f(x) e^{-2πi x·γ} dx`, frequencies in cycles
//! per unit.

// `!(x > 0.0)` style checks deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod balayage;
pub mod error;
pub mod geometry;
pub mod io;
pub mod frames;
pub mod linalg;
pub mod sampling;
pub mod psido;
pub mod spectral;
pub mod stft;

pub use error::{Error, Result};
pub use linalg::C64;
