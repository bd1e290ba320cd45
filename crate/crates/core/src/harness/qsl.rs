//! Log-averaged even moments of the centered position along one path.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{ModelParams, Regime};
use crate::rng::RngStreamSpec;
use crate::sequences::sigma_squared;
use crate::walk::{Mechanism, Walker};

use super::stats::summarize;
use super::{centering, MonteCarlo};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentFunctionalResult {
    pub r: u32,
    pub value: f64,
    pub target: f64,
    pub n: u64,
    pub regime: Regime,
}

/// `(2r)! / (2^r r!)`, the `2r`-th moment of a standard Gaussian.
fn gaussian_even_moment(r: u32) -> f64 {
    (1..=r).map(|i| (2 * i - 1) as f64).product()
}

/// Diffusive: `sigma^{2r} (2r)! / (2^r r! (1 - 2 alpha)^r)`.
/// Critical: `(4 q (1 - p))^r (2r)! / (2^r r!)`.
pub fn qsl_target(params: &ModelParams, r: u32) -> Result<f64> {
    check_order(r)?;
    let var = match params.regime() {
        Regime::Diffusive => sigma_squared(params) / (1.0 - 2.0 * params.alpha()),
        Regime::Critical => 4.0 * params.q() * (1.0 - params.p()),
        Regime::Superdiffusive => {
            return params
                .require(Regime::Diffusive, "even-moment strong law")
                .map(|_| f64::NAN)
        }
    };
    Ok(var.powi(r as i32) * gaussian_even_moment(r))
}

fn check_order(r: u32) -> Result<()> {
    if r == 0 {
        return Err(Error::arg("moment order r must be at least 1"));
    }
    Ok(())
}

/// Diffusive: `(1/log n) sum_{k=1}^n k^{r-1} (S_k/k - q/(1-alpha))^{2r}`.
/// Critical: `(1/log log n) sum_{k=2}^n k^{r-1} (log k)^{-(r+1)} (S_k/k - 2q)^{2r}`.
pub fn qsl_functional(
    params: &ModelParams,
    n: u64,
    r: u32,
    stream: RngStreamSpec,
    mechanism: Mechanism,
) -> Result<MomentFunctionalResult> {
    let target = qsl_target(params, r)?;
    let regime = params.regime();
    let min_n = if regime == Regime::Critical { 3 } else { 2 };
    if n < min_n {
        return Err(Error::arg(format!(
            "even-moment functional needs n >= {min_n}"
        )));
    }
    let mu = centering(params);
    let pow = 2 * r as i32;
    let mut walker = Walker::new(*params, stream, mechanism);
    let mut sum = 0.0;
    for k in 1..=n {
        walker.step();
        let kf = k as f64;
        let dev = (walker.position() as f64 / kf - mu).powi(pow);
        match regime {
            Regime::Diffusive => sum += kf.powi(r as i32 - 1) * dev,
            _ if k >= 2 => sum += kf.powi(r as i32 - 1) * kf.ln().powi(-(r as i32 + 1)) * dev,
            _ => {}
        }
    }
    let normalizer = match regime {
        Regime::Diffusive => (n as f64).ln(),
        _ => (n as f64).ln().ln(),
    };
    Ok(MomentFunctionalResult {
        r,
        value: sum / normalizer,
        target,
        n,
        regime,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct QslEstimate {
    pub r: u32,
    pub n: u64,
    pub target: f64,
    pub mean: f64,
    pub mean_se: f64,
    pub values: Vec<f64>,
}

impl QslEstimate {
    pub fn relative_error(&self) -> f64 {
        (self.mean - self.target).abs() / self.target
    }
}

/// Replica mean of [`qsl_functional`].
pub fn qsl_mean(params: &ModelParams, n: u64, r: u32, mc: &MonteCarlo) -> Result<QslEstimate> {
    let target = qsl_target(params, r)?;
    let values = mc
        .run(|stream| qsl_functional(params, n, r, stream, mc.mechanism).map(|res| res.value))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    let s = summarize(&values);
    Ok(QslEstimate {
        r,
        n,
        target,
        mean: s.mean,
        mean_se: s.mean_se,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(q: f64, p: f64) -> ModelParams {
        ModelParams::new(0.5, q, p).unwrap()
    }

    #[test]
    fn targets() {
        let diff = params(0.25, 0.5);
        let s2 = sigma_squared(&diff);
        assert!((qsl_target(&diff, 1).unwrap() - s2 / 0.5).abs() < 1e-15);
        assert!((qsl_target(&diff, 2).unwrap() - 3.0 * (s2 / 0.5).powi(2)).abs() < 1e-15);
        assert!((qsl_target(&params(0.5, 0.5), 1).unwrap() - 0.25).abs() < 1e-15);
        assert!((qsl_target(&params(0.25, 0.75), 1).unwrap() - 0.25).abs() < 1e-15);
        assert!(
            (qsl_target(&params(0.25, 0.75), 3).unwrap() - 15.0 * 0.25f64.powi(3)).abs() < 1e-15
        );
        assert!(qsl_target(&params(0.5, 0.5), 0).is_err());
        assert!(qsl_target(&params(0.1, 0.9), 1).is_err());
    }

    #[test]
    fn gaussian_moments() {
        assert_eq!(gaussian_even_moment(1), 1.0);
        assert_eq!(gaussian_even_moment(2), 3.0);
        assert_eq!(gaussian_even_moment(4), 105.0);
    }

    #[test]
    fn alpha_zero_mean_matches_exact() {
        // s = q = 0.5, alpha = 0: E[(S_k/k - 1/2)^2] = 1/(4k) exactly.
        let prm = params(0.5, 0.5);
        let n = 2000u64;
        let expect = (1..=n).map(|k| 0.25 / k as f64).sum::<f64>() / (n as f64).ln();
        let est = qsl_mean(&prm, n, 1, &MonteCarlo::new(3, 400)).unwrap();
        assert!(
            (est.mean - expect).abs() < 4.0 * est.mean_se,
            "{} vs {expect} ± {}",
            est.mean,
            est.mean_se
        );
    }
}
