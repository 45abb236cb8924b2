//! Numerical core for integral geometry on the space M_{n,m} of real n×m
//! matrices: Siegel gamma/beta functions, the K-Bessel function of matrix
//! argument, quadrature and Monte Carlo engines over the positive definite
//! cone P_m and Stiefel manifolds, the Cayley-Laplace operator and its radial
//! part, zeta integrals, Riesz potentials, heat kernels, and the matrix
//! k-plane Radon transform.
//!
//! Everything is desk-scale by design: dimensions are dynamic but capped at
//! n·m ≤ 64, and the deterministic quadrature engines only engage for
//! integrals of dimension ≤ 4 (m ≤ 2 on the cone). All stochastic routines
//! take explicit seeded RNG streams and are bit-reproducible for a fixed
//! `(seed, workers)` pair.
//!
//! The crate is `no_std` (with `alloc`); everything that touches the OS —
//! CLI, JSON reports, timing — lives in the companion `mplane` crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod diff;
pub mod error;
pub mod matrix;
pub mod quad;
pub mod radon;
pub mod report;
pub mod riesz;
pub mod rng;
pub mod special;
pub mod stats;
pub mod testfn;
pub mod zeta;

pub use error::{Error, Result};
pub use rand_chacha::ChaCha8Rng;
pub use matrix::{PosDefMatrix, RectMatrix, Rotation, StiefelFrame, SymMatrix, UpperTriangular};
pub use quad::{MCEstimate, QuadratureSpec, Strategy};
pub use report::Report;
pub use rng::RngStreams;

/// Scalars α, λ, ν of the theory live in ℂ; matrices stay real.
pub type Complex64 = num_complex::Complex<f64>;

/// Hard cap on matrix size (entries), per the desk-scale contract.
pub const MAX_ENTRIES: usize = 64;
