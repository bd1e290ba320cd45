//! Rescaled position process at finitely many times, and its covariance.
//!
//! Diffusive: `Y(t) = sqrt(n) (S_m/m - q/(1-alpha))` with `m = floor(n t)`.
//! Critical: `Y(t) = sqrt(n^t / log n) (S_m/m - 2q)` with `m = floor(n^t)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{ModelParams, Regime};
use crate::rng::RngStreamSpec;
use crate::spectral::theoretical_covariance;
use crate::walk::{Mechanism, Walker};

use super::stats::batch_means_se;
use super::{centering, MonteCarlo};

pub const MIN_COVARIANCE_REPLICAS: u64 = 1000;
const SE_BATCHES: usize = 20;

pub fn default_grid(regime: Regime) -> Vec<f64> {
    match regime {
        Regime::Critical => vec![0.5, 0.75, 1.0],
        _ => vec![0.25, 0.5, 0.75, 1.0],
    }
}

/// `floor(x)`, snapping values within `1e-9` relative of an integer so
/// that `10000^0.75` maps to 1000.
fn snapped_floor(x: f64) -> u64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r as u64
    } else {
        x.floor() as u64
    }
}

/// Grid time `t` mapped to `(step index, scale)` so that
/// `Y(t) = scale * (S_index/index - centering)`.
fn time_map(regime: Regime, n: u64, t: f64) -> (u64, f64) {
    let nf = n as f64;
    match regime {
        Regime::Critical => {
            let nt = nf.powf(t);
            (snapped_floor(nt), (nt / nf.ln()).sqrt())
        }
        _ => (snapped_floor(nf * t), nf.sqrt()),
    }
}

#[derive(Debug, Clone)]
struct GridPlan {
    regime: Regime,
    times: Vec<f64>,
    indices: Vec<u64>,
    scales: Vec<f64>,
    mu: f64,
}

fn plan(params: &ModelParams, n: u64, grid: &[f64]) -> Result<GridPlan> {
    let regime = params.regime();
    if regime == Regime::Superdiffusive {
        params.require(Regime::Diffusive, "functional CLT")?;
    }
    if grid.is_empty() {
        return Err(Error::arg("time grid is empty"));
    }
    if !grid.iter().all(|t| t.is_finite() && *t > 0.0) || !grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::arg(
            "grid times must be positive, finite and strictly increasing",
        ));
    }
    let min_index = if regime == Regime::Critical { 2 } else { 1 };
    let (indices, scales): (Vec<u64>, Vec<f64>) =
        grid.iter().map(|&t| time_map(regime, n, t)).unzip();
    if indices[0] < min_index {
        return Err(Error::arg(format!(
            "grid underflow: time {} maps to step {} (< {min_index}) at n = {n}",
            grid[0], indices[0]
        )));
    }
    if !indices.windows(2).all(|w| w[0] <= w[1]) {
        return Err(Error::arg("grid times map to decreasing steps"));
    }
    Ok(GridPlan {
        regime,
        times: grid.to_vec(),
        indices,
        scales,
        mu: centering(params),
    })
}

/// Validates a grid against the horizon without simulating.
pub fn check_grid(params: &ModelParams, n: u64, grid: &[f64]) -> Result<()> {
    plan(params, n, grid).map(|_| ())
}

impl GridPlan {
    fn sample(
        &self,
        params: &ModelParams,
        stream: RngStreamSpec,
        mechanism: Mechanism,
    ) -> Vec<f64> {
        let mut walker = Walker::new(*params, stream, mechanism);
        self.indices
            .iter()
            .zip(&self.scales)
            .map(|(&m, &scale)| {
                let s = walker.advance_to(m);
                scale * (s as f64 / m as f64 - self.mu)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PathSkeleton {
    pub regime: Regime,
    pub grid: Vec<f64>,
    pub indices: Vec<u64>,
    pub values: Vec<f64>,
}

pub fn fclt_skeleton(
    params: &ModelParams,
    n: u64,
    grid: &[f64],
    stream: RngStreamSpec,
    mechanism: Mechanism,
) -> Result<PathSkeleton> {
    let plan = plan(params, n, grid)?;
    let values = plan.sample(params, stream, mechanism);
    Ok(PathSkeleton {
        regime: plan.regime,
        grid: plan.times,
        indices: plan.indices,
        values,
    })
}

/// Per-replica values of the `t = 1` statistic: `sqrt(n)(S_n/n - q/(1-alpha))`
/// or `sqrt(n/log n)(S_n/n - 2q)`.
pub fn clt_samples(params: &ModelParams, n: u64, mc: &MonteCarlo) -> Result<Vec<f64>> {
    let plan = plan(params, n, &[1.0])?;
    Ok(mc.run(|stream| plan.sample(params, stream, mc.mechanism)[0]))
}

#[derive(Debug, Clone, Serialize)]
pub struct CovarianceEstimate {
    pub regime: Regime,
    pub grid: Vec<f64>,
    pub empirical: Vec<Vec<f64>>,
    pub theoretical: Vec<Vec<f64>>,
    pub standard_errors: Vec<Vec<f64>>,
    pub replicas: u64,
}

impl CovarianceEstimate {
    /// Largest `|empirical - theoretical| / theoretical` over all cells.
    pub fn max_relative_error(&self) -> f64 {
        let g = self.grid.len();
        (0..g)
            .flat_map(|i| (0..g).map(move |j| (i, j)))
            .map(|(i, j)| {
                (self.empirical[i][j] - self.theoretical[i][j]).abs() / self.theoretical[i][j].abs()
            })
            .fold(0.0, f64::max)
    }
}

fn sample_covariance(rows: &[Vec<f64>], i: usize, j: usize) -> f64 {
    let n = rows.len() as f64;
    let (mi, mj) = rows
        .iter()
        .fold((0.0, 0.0), |(a, b), r| (a + r[i], b + r[j]));
    let (mi, mj) = (mi / n, mj / n);
    rows.iter().map(|r| (r[i] - mi) * (r[j] - mj)).sum::<f64>() / (n - 1.0)
}

pub fn covariance_grid(
    params: &ModelParams,
    n: u64,
    grid: &[f64],
    mc: &MonteCarlo,
) -> Result<CovarianceEstimate> {
    let plan = plan(params, n, grid)?;
    if mc.replicas < MIN_COVARIANCE_REPLICAS {
        return Err(Error::arg(format!(
            "covariance grid needs at least {MIN_COVARIANCE_REPLICAS} replicas, got {}",
            mc.replicas
        )));
    }
    let rows = mc.run(|stream| plan.sample(params, stream, mc.mechanism));
    let g = grid.len();
    let mut empirical = vec![vec![0.0; g]; g];
    let mut theoretical = vec![vec![0.0; g]; g];
    let mut standard_errors = vec![vec![0.0; g]; g];
    for i in 0..g {
        for j in i..g {
            let c = sample_covariance(&rows, i, j);
            let se = batch_means_se(&rows, SE_BATCHES, |chunk| sample_covariance(chunk, i, j));
            let th = theoretical_covariance(params, grid[i], grid[j])?;
            for (a, b) in [(i, j), (j, i)] {
                empirical[a][b] = c;
                standard_errors[a][b] = se;
                theoretical[a][b] = th;
            }
        }
    }
    Ok(CovarianceEstimate {
        regime: plan.regime,
        grid: plan.times,
        empirical,
        theoretical,
        standard_errors,
        replicas: mc.replicas,
    })
}
