//! Simulation and verification laboratory for the minimal random walk (MRW)
//! and its equivalent two-color Pólya urn.
//!
//! The walk moves by `X_n ∈ {0, 1}`: the first step is Bernoulli(`s`), and
//! each later step copies a uniformly chosen past step through a Bernoulli
//! response (`q` after a 0, `p` after a 1). The memory parameter
//! `alpha = p - q` selects the diffusive, critical or superdiffusive regime.
//!
//! Layout:
//! - [`params`], [`rng`], [`walk`], [`urn`]: the process and its simulation.
//! - [`sequences`]: the martingale coefficient sequences `a_n, A_n, v_n, f_n`.
//! - [`exact`]: dynamic-programming laws of `S_n`, used as ground truth.
//! - [`spectral`]: mean replacement matrix of the urn and covariance kernels.
//! - [`harness`]: Monte Carlo experiments for the limit theorems.
//! - [`cli`]: the `mrw` command-line front end.

pub mod cli;
pub mod error;
pub mod exact;
pub mod harness;
pub mod params;
pub mod rng;
pub mod sequences;
pub mod spectral;
pub mod urn;
pub mod walk;

pub use error::{Error, Result};
pub use params::{ModelParams, Regime};
pub use rng::RngStreamSpec;
