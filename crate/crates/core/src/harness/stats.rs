//! Small statistics helpers shared by the experiments.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

/// Mean and unbiased variance with their standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub mean_se: f64,
    /// Large-sample standard error of the sample variance,
    /// `sqrt((m4 - var^2) / count)`.
    pub variance_se: f64,
}

pub fn summarize(xs: &[f64]) -> Summary {
    let n = xs.len();
    if n == 0 {
        return Summary {
            count: 0,
            mean: f64::NAN,
            variance: f64::NAN,
            mean_se: f64::NAN,
            variance_se: f64::NAN,
        };
    }
    let nf = n as f64;
    let mean = xs.iter().sum::<f64>() / nf;
    let (m2, m4) = xs.iter().fold((0.0, 0.0), |(a, b), &x| {
        let d = (x - mean) * (x - mean);
        (a + d, b + d * d)
    });
    let variance = if n > 1 { m2 / (nf - 1.0) } else { 0.0 };
    let pop_var = m2 / nf;
    Summary {
        count: n,
        mean,
        variance,
        mean_se: (variance / nf).sqrt(),
        variance_se: ((m4 / nf - pop_var * pop_var).max(0.0) / nf).sqrt(),
    }
}

/// Centered Gaussian CDF with variance `var > 0`.
pub fn gaussian_cdf(var: f64) -> impl Fn(f64) -> f64 {
    let normal = Normal::new(0.0, var.sqrt()).expect("positive finite variance");
    move |x| normal.cdf(x)
}

/// One-sample Kolmogorov–Smirnov statistic of equally weighted samples.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        // ties are one jump of the empirical CDF
        let mut j = i;
        while j + 1 < xs.len() && xs[j + 1] == xs[i] {
            j += 1;
        }
        let f = cdf(xs[i]);
        d = d
            .max((f - i as f64 / n).abs())
            .max(((j + 1) as f64 / n - f).abs());
        i = j + 1;
    }
    d
}

/// Standard error of `estimator` by non-overlapping batch means over
/// contiguous chunks.
pub fn batch_means_se<T>(items: &[T], batches: usize, estimator: impl Fn(&[T]) -> f64) -> f64 {
    let batches = batches.max(2).min(items.len().max(2));
    let size = items.len() / batches;
    if size == 0 {
        return f64::NAN;
    }
    let estimates: Vec<f64> = items
        .chunks_exact(size)
        .take(batches)
        .map(estimator)
        .collect();
    summarize(&estimates).mean_se
}

/// Lower end of a one-sided 99% normal interval.
pub fn lower_99(estimate: f64, se: f64) -> f64 {
    estimate - 2.326_347_874_040_841 * se
}
