//! Desk-scale laboratory for non-asymptotic random matrix phenomena.
//!
//! The crate is organized around a small set of primitives:
//!
//! - [`ensembles`]: samplers for a catalog of isotropic distributions
//!   (Gaussian, Bernoulli, coordinate, spherical, frames, selector models,
//!   DFT and Hadamard rows) with exact analytic metadata;
//! - [`scalartails`]: empirical Orlicz norms and evaluable Hoeffding-,
//!   Bernstein-, and Khintchine-type tail bounds;
//! - [`nets`]: greedy epsilon-nets of the unit sphere and spectral-norm
//!   estimation through nets;
//! - [`spectra`]: a deterministic one-sided Jacobi SVD kernel and the
//!   approximate-isometry calculus;
//! - [`matrixsum`]: sums of independent random matrices (matrix Bernstein,
//!   Rudelson ratios, symmetrization, decoupling, the Latala bound);
//! - [`theorems`]: Monte Carlo verifiers for the extreme-singular-value
//!   theorems, covariance estimation, and sampling corollaries;
//! - [`rip`]: restricted-isometry certification with exact subset
//!   enumeration, Monte Carlo lower bounds, and partial Fourier/Hadamard
//!   measurement matrices;
//! - [`report`]: reproducible experiment reports (JSON + per-trial CSV).
//!
//! Everything downstream of a [`rng::SeedSpec`] is deterministic: a report
//! can be replayed bit-for-bit from its manifest regardless of thread count.

pub mod ensembles;
pub mod error;
pub mod matrix;
pub mod matrixsum;
pub mod nets;
pub mod report;
pub mod rip;
pub mod rng;
pub mod scalartails;
pub mod special;
pub mod spectra;
pub mod theorems;

pub use error::{Error, Result};
pub use matrix::DenseMatrix;
pub use rng::SeedSpec;
pub use spectra::SingularSpectrum;
