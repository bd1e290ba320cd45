//! The superdiffusive limit `n^{1-alpha}(S_n/n - q/(1-alpha)) → L`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::exact_moments;
use crate::params::{ModelParams, Regime};
use crate::walk::Walker;

use super::stats::summarize;
use super::{centering, MonteCarlo};

#[derive(Debug, Clone, Serialize)]
pub struct LimitEstimate {
    pub n: u64,
    pub mean: f64,
    pub variance: f64,
    pub mean_se: f64,
    pub variance_se: f64,
    /// `n^{-alpha}(E[S_n] - n q/(1-alpha))` from the exact mean recursion.
    pub exact_mean: f64,
    /// Exact variance of the statistic from the second-moment recursion.
    pub exact_variance: f64,
    /// RMS over replicas of the statistic at `2n` minus the one at `n`,
    /// both taken along the same path.
    pub cauchy_rms: f64,
    #[serde(skip)]
    pub samples: Vec<f64>,
}

fn statistic(n: u64, s: u64, alpha: f64, mu: f64) -> f64 {
    let nf = n as f64;
    nf.powf(-alpha) * (s as f64 - nf * mu)
}

pub fn superdiffusive_limit(
    params: &ModelParams,
    n_list: &[u64],
    mc: &MonteCarlo,
) -> Result<Vec<LimitEstimate>> {
    params.require(Regime::Superdiffusive, "superdiffusive almost-sure limit")?;
    if n_list.is_empty() || n_list[0] == 0 || !n_list.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::arg(
            "n_list must be nonempty, positive and strictly increasing",
        ));
    }
    if mc.replicas < 2 {
        return Err(Error::arg("need at least 2 replicas"));
    }
    let alpha = params.alpha();
    let mu = centering(params);
    // checkpoints n_1, 2n_1, n_2, 2n_2, ... visited in increasing order
    let mut checkpoints: Vec<u64> = n_list.iter().flat_map(|&n| [n, 2 * n]).collect();
    checkpoints.sort_unstable();
    checkpoints.dedup();
    let per_replica: Vec<Vec<(u64, f64)>> = mc.run(|stream| {
        let mut walker = Walker::new(*params, stream, mc.mechanism);
        checkpoints
            .iter()
            .map(|&m| (m, statistic(m, walker.advance_to(m), alpha, mu)))
            .collect()
    });
    let lookup =
        |row: &[(u64, f64)], m: u64| row.iter().find(|(k, _)| *k == m).expect("checkpoint").1;

    n_list
        .iter()
        .map(|&n| {
            let samples: Vec<f64> = per_replica.iter().map(|row| lookup(row, n)).collect();
            let cauchy = per_replica
                .iter()
                .map(|row| (lookup(row, 2 * n) - lookup(row, n)).powi(2))
                .sum::<f64>()
                / per_replica.len() as f64;
            let s = summarize(&samples);
            let mom = exact_moments(params, n)?;
            let nf = n as f64;
            let scale = nf.powf(-alpha);
            Ok(LimitEstimate {
                n,
                mean: s.mean,
                variance: s.variance,
                mean_se: s.mean_se,
                variance_se: s.variance_se,
                exact_mean: scale * (mom.mean - nf * mu),
                exact_variance: scale * scale * mom.variance(),
                cauchy_rms: cauchy.sqrt(),
                samples,
            })
        })
        .collect()
}
