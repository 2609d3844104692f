//! Discrete ALIF (Adaptive Local Iterative Filtering) signal decomposition and
//! a spectral-analysis toolkit for its iteration matrices.
//!
//! The crate is organized around the objects of the method:
//!
//! * [`filters`] — the averaging kernel `k` and the per-position window width
//!   `L(x)`, the two ingredients that define every iteration matrix.
//! * [`matrices`] — the dense iteration matrix `K_n`, its Toeplitz/diagonal
//!   factors and band truncations.
//! * [`symbol`] — the spectral symbol `kappa(x, theta)` attached to the
//!   sequence `{K_n}` and its Fourier slices.
//! * [`spectral`] — eigen/singular analysis, distribution diagnostics, and the
//!   truncation-error and almost-symmetry witnesses.
//! * [`alif`] — the decomposition engine itself: sifting inner loop, IMF
//!   extraction outer loop, convergence telemetry.
//! * [`counterexample`] — an exact-rational fixture of a 3x3 iteration matrix
//!   whose inner loop provably diverges even though its symbol stays in
//!   `[0, 2]`, with a verification report.
//!
//! The crate is `no_std`-compatible (requires `alloc`); enable the `libm`
//! feature and disable default features to build without the standard
//! library. IO, file formats, and the command-line front end live in the
//! companion `alif-cli` crate.

#![cfg_attr(not(feature = "std"), no_std)]

#[cfg(not(any(feature = "std", feature = "libm")))]
compile_error!("alif-core requires either the `std` or the `libm` feature");

extern crate alloc;

pub mod alif;
pub mod counterexample;
pub mod filters;
pub(crate) mod fmath;
pub mod matrices;
pub mod rational;
pub mod rng;
pub mod spectral;
pub mod symbol;

mod eigen;
mod svd;

pub use num_complex::Complex64;
