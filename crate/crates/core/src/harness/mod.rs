//! Monte Carlo experiments for the limit theorems of the walk.
//!
//! Almost-sure statements are single-path; the experiments here return
//! per-path objects plus replica aggregates. Replica `i` always uses the
//! stream `(seed, i)`, and aggregation runs in replica-index order, so
//! results do not depend on the number of worker threads.

pub mod asclt;
pub mod fclt;
pub mod qsl;
pub mod stats;
pub mod superdiffusive;

use rayon::prelude::*;
use serde::Serialize;

use crate::params::ModelParams;
use crate::rng::RngStreamSpec;
use crate::walk::Mechanism;

pub use asclt::{asclt_measure, asclt_measure_critical, asclt_measure_diffusive, WeightedSample};
pub use fclt::{
    clt_samples, covariance_grid, default_grid, fclt_skeleton, CovarianceEstimate, PathSkeleton,
};
pub use qsl::{qsl_functional, qsl_mean, qsl_target, MomentFunctionalResult, QslEstimate};
pub use superdiffusive::{superdiffusive_limit, LimitEstimate};

/// Replica layout of a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MonteCarlo {
    pub seed: u64,
    pub replicas: u64,
    pub mechanism: Mechanism,
}

impl MonteCarlo {
    pub fn new(seed: u64, replicas: u64) -> Self {
        Self {
            seed,
            replicas,
            mechanism: Mechanism::Direct,
        }
    }

    pub fn with_mechanism(mut self, mechanism: Mechanism) -> Self {
        self.mechanism = mechanism;
        self
    }

    pub fn stream(&self, replica: u64) -> RngStreamSpec {
        RngStreamSpec::new(self.seed, replica)
    }

    /// Runs `f` once per replica on the current rayon pool; the output is in
    /// replica-index order.
    pub fn run<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(RngStreamSpec) -> T + Sync + Send,
    {
        (0..self.replicas)
            .into_par_iter()
            .map(|i| f(self.stream(i)))
            .collect()
    }
}

/// `q / (1 - alpha)`, which is `2q` in the critical regime.
pub(crate) fn centering(params: &ModelParams) -> f64 {
    params.drift()
}
