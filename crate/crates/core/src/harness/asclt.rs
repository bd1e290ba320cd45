//! Logarithmically weighted empirical measures along a single path.
//!
//! Diffusive: atoms `sqrt(k) (S_k/k - q/(1-alpha))` with weights `1/k`,
//! normalizer `log n`. Critical: atoms `sqrt(k / log k) (S_k/k - 2q)` with
//! weights `1/(k log k)` for `k >= 2`, normalizer `log log n`.
//!
//! Queries (CDF, moments, KS) use the measure divided by its total weight,
//! which is a probability measure; `normalizer` is kept for the
//! weight-sum ratio.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{ModelParams, Regime};
use crate::rng::RngStreamSpec;
use crate::sequences::sigma_squared;
use crate::walk::{Mechanism, Walker};

use super::centering;
use super::stats::gaussian_cdf;

/// Paths up to this length keep every atom; longer ones are binned.
pub const MAX_STORED_POINTS: usize = 1_000_000;
const BINS: usize = 10_000;
const BIN_HALF_WIDTH_SD: f64 = 8.0;

#[derive(Debug, Clone, Serialize)]
pub enum Storage {
    Points {
        points: Vec<f64>,
        weights: Vec<f64>,
    },
    /// `counts[0]` is underflow, `counts[BINS + 1]` overflow.
    Binned {
        lo: f64,
        width: f64,
        counts: Vec<f64>,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightedSample {
    pub storage: Storage,
    pub normalizer: f64,
    pub total_weight: f64,
    /// Variance of the Gaussian the measure should approach.
    pub target_variance: f64,
    sum_wx: f64,
    sum_wx2: f64,
}

impl WeightedSample {
    fn new(expected_len: usize, normalizer: f64, target_variance: f64) -> Self {
        let storage = if expected_len <= MAX_STORED_POINTS {
            Storage::Points {
                points: Vec::with_capacity(expected_len),
                weights: Vec::with_capacity(expected_len),
            }
        } else {
            let sd = if target_variance > 0.0 {
                target_variance.sqrt()
            } else {
                1.0
            };
            let lo = -BIN_HALF_WIDTH_SD * sd;
            Storage::Binned {
                lo,
                width: -2.0 * lo / BINS as f64,
                counts: vec![0.0; BINS + 2],
            }
        };
        Self {
            storage,
            normalizer,
            total_weight: 0.0,
            target_variance,
            sum_wx: 0.0,
            sum_wx2: 0.0,
        }
    }

    fn push(&mut self, x: f64, w: f64) {
        self.total_weight += w;
        self.sum_wx += w * x;
        self.sum_wx2 += w * x * x;
        match &mut self.storage {
            Storage::Points { points, weights } => {
                points.push(x);
                weights.push(w);
            }
            Storage::Binned { lo, width, counts } => {
                let idx = if x < *lo {
                    0
                } else {
                    (((x - *lo) / *width) as usize + 1).min(BINS + 1)
                };
                counts[idx] += w;
            }
        }
    }

    /// `total_weight / normalizer`; tends to 1.
    pub fn weight_ratio(&self) -> f64 {
        self.total_weight / self.normalizer
    }

    pub fn mean(&self) -> f64 {
        self.sum_wx / self.total_weight
    }

    pub fn second_moment(&self) -> f64 {
        self.sum_wx2 / self.total_weight
    }

    pub fn variance(&self) -> f64 {
        self.second_moment() - self.mean().powi(2)
    }

    /// Normalized weight of atoms `<= x`. Binned storage resolves `x` to
    /// the bin grid.
    pub fn cdf(&self, x: f64) -> f64 {
        let mass = match &self.storage {
            Storage::Points { points, weights } => points
                .iter()
                .zip(weights)
                .filter(|(p, _)| **p <= x)
                .map(|(_, w)| w)
                .sum::<f64>(),
            Storage::Binned { lo, width, counts } => {
                let upto = if x < *lo {
                    0
                } else {
                    (((x - *lo) / *width) as usize + 1).min(BINS + 1)
                };
                counts[..=upto].iter().sum::<f64>()
            }
        };
        mass / self.total_weight
    }

    /// Sorted support with cumulative normalized weight at each atom.
    pub fn cumulative(&self) -> Vec<(f64, f64)> {
        match &self.storage {
            Storage::Points { points, weights } => {
                let mut idx: Vec<usize> = (0..points.len()).collect();
                idx.sort_by(|&a, &b| points[a].total_cmp(&points[b]));
                let mut acc = 0.0;
                let mut out: Vec<(f64, f64)> = Vec::with_capacity(idx.len());
                for i in idx {
                    acc += weights[i];
                    match out.last_mut() {
                        Some(last) if last.0 == points[i] => last.1 = acc / self.total_weight,
                        _ => out.push((points[i], acc / self.total_weight)),
                    }
                }
                out
            }
            Storage::Binned { lo, width, counts } => {
                let mut acc = 0.0;
                counts
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        acc += c;
                        // right edge of bin i; underflow ends at lo
                        (lo + i as f64 * width, acc / self.total_weight)
                    })
                    .collect()
            }
        }
    }

    /// Kolmogorov distance to `N(0, target_variance)`; `None` when the
    /// target is degenerate (`sigma^2 = 0`).
    pub fn ks_distance(&self) -> Option<f64> {
        if self.target_variance <= 0.0 || self.target_variance.is_nan() {
            return None;
        }
        let phi = gaussian_cdf(self.target_variance);
        let mut prev = 0.0;
        let mut d: f64 = 0.0;
        for (x, c) in self.cumulative() {
            let f = phi(x);
            d = d.max((f - prev).abs()).max((c - f).abs());
            prev = c;
        }
        Some(d)
    }
}

pub fn asclt_measure_diffusive(
    params: &ModelParams,
    n: u64,
    stream: RngStreamSpec,
    mechanism: Mechanism,
) -> Result<WeightedSample> {
    params.require(Regime::Diffusive, "diffusive almost-sure CLT")?;
    if n < 10 {
        return Err(Error::arg("diffusive ASCLT needs n >= 10"));
    }
    let mu = centering(params);
    let target = sigma_squared(params) / (1.0 - 2.0 * params.alpha());
    let mut sample = WeightedSample::new(n as usize, (n as f64).ln(), target);
    let mut walker = Walker::new(*params, stream, mechanism);
    for k in 1..=n {
        walker.step();
        let kf = k as f64;
        sample.push(kf.sqrt() * (walker.position() as f64 / kf - mu), 1.0 / kf);
    }
    Ok(sample)
}

pub fn asclt_measure_critical(
    params: &ModelParams,
    n: u64,
    stream: RngStreamSpec,
    mechanism: Mechanism,
) -> Result<WeightedSample> {
    params.require(Regime::Critical, "critical almost-sure CLT")?;
    if n < 3 {
        return Err(Error::arg("critical ASCLT needs n >= 3"));
    }
    let mu = centering(params);
    let target = 4.0 * params.q() * (1.0 - params.p());
    let mut sample = WeightedSample::new(n as usize - 1, (n as f64).ln().ln(), target);
    let mut walker = Walker::new(*params, stream, mechanism);
    walker.step();
    for k in 2..=n {
        walker.step();
        let kf = k as f64;
        let lk = kf.ln();
        sample.push(
            (kf / lk).sqrt() * (walker.position() as f64 / kf - mu),
            1.0 / (kf * lk),
        );
    }
    Ok(sample)
}

/// Dispatches on the regime of `params`.
pub fn asclt_measure(
    params: &ModelParams,
    n: u64,
    stream: RngStreamSpec,
    mechanism: Mechanism,
) -> Result<WeightedSample> {
    match params.regime() {
        Regime::Critical => asclt_measure_critical(params, n, stream, mechanism),
        _ => asclt_measure_diffusive(params, n, stream, mechanism),
    }
}
