//! Sine-activated low-rank matrices at desk scale.
//!
//! A low-rank product `U V^T` caps the rank of a weight matrix at `k`;
//! modulating it entrywise as `sin(omega * U V^T) / g` lifts the effective
//! rank without adding parameters. This crate provides:
//!
//! - dense-matrix spectral primitives (one-sided Jacobi singular values,
//!   stable rank, tolerance-cut numerical rank) in [`matrix`], [`svd`],
//!   [`spectrum`];
//! - sine-activated low-rank layers and the frozen-base adapter form in
//!   [`lowrank`];
//! - executable checks of the rank lower bound, the Frobenius/operator norm
//!   lemmas, and the rank-lift frequency search in [`theory`];
//! - a small manually-differentiated coordinate-network trainer with image
//!   and occupancy tasks in [`nn`];
//! - reproducible command-line reports in [`cli`].
//!
//! Start with the `examples/` directory: each file is a runnable walkthrough
//! of one capability (`cargo run --release --example spectrum_nonlinearities`).

pub mod cli;
pub mod error;
pub mod init;
pub mod io;
pub mod lowrank;
pub mod matrix;
pub mod nn;
pub mod spectrum;
pub mod svd;
pub mod theory;

pub use error::{Error, Result};
pub use matrix::{DenseMatrix, FnKind};
pub use spectrum::SpectrumReport;
pub use svd::RankTolerance;
