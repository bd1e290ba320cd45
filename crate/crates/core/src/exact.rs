//! Exact laws of `S_n`, computed without simulation.
//!
//! The step after time `m` is Bernoulli(`q + alpha S_m / m`), so the pair
//! `(m, S_m)` is a Markov chain and the law of `S_n` follows from a forward
//! pass over `O(n^2)` states.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Largest `n` accepted by the `O(n^2)` dynamic programs.
pub const DP_BOUND: usize = 10_000;

/// Law of `S_n`: `probs[j] = P(S_n = j)`, `j = 0..=n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactDistribution {
    pub n: usize,
    pub probs: Vec<f64>,
}

impl ExactDistribution {
    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// `E[S_n^k]`.
    pub fn raw_moment(&self, k: u32) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(j, &pr)| pr * (j as f64).powi(k as i32))
            .sum()
    }

    pub fn mean(&self) -> f64 {
        self.raw_moment(1)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.probs
            .iter()
            .enumerate()
            .map(|(j, &pr)| pr * (j as f64 - m).powi(2))
            .sum()
    }

    /// `E[g(S_n)]`.
    pub fn expect(&self, g: impl Fn(usize) -> f64) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(j, &pr)| pr * g(j))
            .sum()
    }

    /// `P(S_n <= j)` for every `j`.
    pub fn cdf(&self) -> Vec<f64> {
        self.probs
            .iter()
            .scan(0.0, |acc, &pr| {
                *acc += pr;
                Some(*acc)
            })
            .collect()
    }

    /// Half the L1 distance; supports of different length are zero padded.
    pub fn tv_distance(&self, other: &ExactDistribution) -> f64 {
        let len = self.probs.len().max(other.probs.len());
        let get = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
        0.5 * (0..len)
            .map(|i| (get(&self.probs, i) - get(&other.probs, i)).abs())
            .sum::<f64>()
    }
}

fn check_bound(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::arg("n must be at least 1"));
    }
    if n > DP_BOUND {
        return Err(Error::arg(format!(
            "n = {n} exceeds the exact DP bound {DP_BOUND}"
        )));
    }
    Ok(())
}

/// Law of `S_n` from the walk's conditional step law.
pub fn exact_distribution(params: &ModelParams, n: usize) -> Result<ExactDistribution> {
    check_bound(n)?;
    let mut probs = vec![0.0; n + 1];
    probs[0] = 1.0 - params.s();
    probs[1] = params.s();
    for m in 1..n {
        for s in (0..=m).rev() {
            let mass = probs[s];
            if mass == 0.0 {
                continue;
            }
            let pi = params.move_probability(m as u64, s as u64);
            probs[s + 1] += mass * pi;
            probs[s] = mass * (1.0 - pi);
        }
    }
    Ok(ExactDistribution { n, probs })
}

/// Law of the blue count after `n` additions, from the urn's own draw rule:
/// a blue ball is drawn with probability `blue / m`, then a blue ball is
/// added with probability `p` (blue drawn) or `q` (red drawn).
pub fn urn_blue_distribution(params: &ModelParams, n: usize) -> Result<ExactDistribution> {
    check_bound(n)?;
    let mut cur = vec![1.0 - params.s(), params.s()];
    for m in 1..n {
        let mut next = vec![0.0; m + 2];
        for (blue, &mass) in cur.iter().enumerate() {
            let draw_blue = blue as f64 / m as f64;
            let draw_red = (m - blue) as f64 / m as f64;
            let add_blue = draw_blue * params.p() + draw_red * params.q();
            next[blue + 1] += mass * add_blue;
            next[blue] += mass * (draw_blue * (1.0 - params.p()) + draw_red * (1.0 - params.q()));
        }
        cur = next;
    }
    Ok(ExactDistribution { n, probs: cur })
}

/// TV distance between the urn's blue-count law and the walk's law of `S_n`.
pub fn urn_walk_equivalence_check(params: &ModelParams, n: usize) -> Result<f64> {
    Ok(exact_distribution(params, n)?.tv_distance(&urn_blue_distribution(params, n)?))
}

/// `(m, E[S_m], E[S_m^2])` for `m = 1, 2, ...`, from the exact recursions
/// `E[S_{m+1}] = q + gamma_m E[S_m]` and
/// `E[S_{m+1}^2] = (1 + 2 alpha/m) E[S_m^2] + (2q + alpha/m) E[S_m] + q`.
#[derive(Debug, Clone)]
pub struct MomentRecursion {
    q: f64,
    alpha: f64,
    m: u64,
    first: f64,
    second: f64,
}

impl MomentRecursion {
    pub fn new(params: &ModelParams) -> Self {
        Self {
            q: params.q(),
            alpha: params.alpha(),
            m: 1,
            first: params.s(),
            second: params.s(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactMoments {
    pub m: u64,
    pub mean: f64,
    pub second: f64,
}

impl ExactMoments {
    pub fn variance(&self) -> f64 {
        self.second - self.mean * self.mean
    }

    /// `E[(S_m - c m)^2] / m^2`, the mean square of `S_m/m - c`.
    pub fn mean_square_deviation(&self, c: f64) -> f64 {
        let m = self.m as f64;
        (self.variance() + (self.mean - c * m).powi(2)) / (m * m)
    }
}

impl Iterator for MomentRecursion {
    type Item = ExactMoments;

    fn next(&mut self) -> Option<ExactMoments> {
        let out = ExactMoments {
            m: self.m,
            mean: self.first,
            second: self.second,
        };
        let r = self.alpha / self.m as f64;
        self.second = (1.0 + 2.0 * r) * self.second + (2.0 * self.q + r) * self.first + self.q;
        self.first = self.q + (1.0 + r) * self.first;
        self.m += 1;
        Some(out)
    }
}

/// `E[S_m]` for `m = 1..=n`.
pub fn exact_mean_recursion(params: &ModelParams, n: usize) -> Vec<f64> {
    MomentRecursion::new(params)
        .take(n)
        .map(|x| x.mean)
        .collect()
}

/// Exact first two moments of `S_n`; `O(n)` time, constant memory.
pub fn exact_moments(params: &ModelParams, n: u64) -> Result<ExactMoments> {
    if n == 0 {
        return Err(Error::arg("n must be at least 1"));
    }
    Ok(MomentRecursion::new(params)
        .nth(n as usize - 1)
        .expect("unbounded iterator"))
}

/// `Cov(S_i, S_j)` for `1 <= i <= j`. Conditioning on time `i`,
/// `E[S_j | S_i] = c + (prod_{m=i}^{j-1} gamma_m) S_i`.
pub fn exact_covariance(params: &ModelParams, i: u64, j: u64) -> Result<f64> {
    if i == 0 || i > j {
        return Err(Error::arg(format!(
            "need 1 <= i <= j, got i = {i}, j = {j}"
        )));
    }
    let var_i = exact_moments(params, i)?.variance();
    let gain: f64 = (i..j)
        .map(|m| (m as f64 + params.alpha()) / m as f64)
        .product();
    Ok(gain * var_i)
}

fn check_state(n: u64, state: u64) -> Result<()> {
    if n == 0 || state > n {
        return Err(Error::arg(format!("invalid state S_{n} = {state}")));
    }
    Ok(())
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `E[S_{n+1}^{2k} | S_n = state]` via the binomial expansion
/// `S^{2k} + pi * sum_{j=1}^{2k} C(2k, j) S^{2k-j}`, `pi = q + alpha S/n`.
pub fn conditional_moment_s(params: &ModelParams, n: u64, state: u64, k: u32) -> Result<f64> {
    check_state(n, state)?;
    if k == 0 {
        return Err(Error::arg("moment order k must be at least 1"));
    }
    let pi = params.move_probability(n, state);
    let s = state as f64;
    let order = 2 * k;
    let tail: f64 = (1..=order)
        .map(|j| binomial(order, j) * s.powi((order - j) as i32))
        .sum();
    Ok(s.powi(order as i32) + pi * tail)
}

/// `E[eps_{n+1}^k | S_n = state]` as
/// `sum_{j=0}^{k-2} C(k, j) pi^{j+1} (-1)^j + (-1)^{k-1} (k-1) pi^k`.
pub fn conditional_moment_eps(params: &ModelParams, n: u64, state: u64, k: u32) -> Result<f64> {
    check_state(n, state)?;
    if k < 2 {
        return Err(Error::arg("eps moment order must be at least 2"));
    }
    let pi = params.move_probability(n, state);
    let sign = |j: u32| if j.is_multiple_of(2) { 1.0 } else { -1.0 };
    let sum: f64 = (0..=k - 2)
        .map(|j| binomial(k, j) * pi.powi(j as i32 + 1) * sign(j))
        .sum();
    Ok(sum + sign(k - 1) * (k - 1) as f64 * pi.powi(k as i32))
}
