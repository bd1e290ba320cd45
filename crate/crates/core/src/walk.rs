//! Trajectories of the minimal random walk.
//!
//! Two mechanisms produce the same law. [`Mechanism::Lookup`] follows the
//! definition literally: it stores every past step, recalls one uniformly
//! and responds with Bernoulli(`q`) or Bernoulli(`p`). [`Mechanism::Direct`]
//! uses the collapsed conditional law Bernoulli(`q + alpha * S_m / m`), which
//! needs only the current position and so runs in constant memory.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::rng::RngStreamSpec;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mechanism {
    #[default]
    Direct,
    Lookup,
}

/// Incremental simulator; one call to [`Walker::step`] advances time by one.
#[derive(Debug, Clone)]
pub struct Walker {
    params: ModelParams,
    mechanism: Mechanism,
    rng: ChaCha8Rng,
    time: u64,
    position: u64,
    history: Vec<bool>,
}

impl Walker {
    pub fn new(params: ModelParams, stream: RngStreamSpec, mechanism: Mechanism) -> Self {
        Self {
            params,
            mechanism,
            rng: stream.rng(),
            time: 0,
            position: 0,
            history: Vec::new(),
        }
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn position(&self) -> u64 {
        self.position
    }

    /// Draws `X_{m+1}` where `m` is the current time, and returns it.
    #[inline]
    pub fn step(&mut self) -> bool {
        let m = self.time;
        let x = if m == 0 {
            self.rng.random::<f64>() < self.params.s()
        } else {
            match self.mechanism {
                Mechanism::Direct => {
                    // u < q + alpha S/m, multiplied through by m
                    let mf = m as f64;
                    let u: f64 = self.rng.random();
                    u * mf < self.params.q() * mf + self.params.alpha() * self.position as f64
                }
                Mechanism::Lookup => {
                    let k = self.rng.random_range(0..m as usize);
                    let response = if self.history[k] {
                        self.params.p()
                    } else {
                        self.params.q()
                    };
                    self.rng.random::<f64>() < response
                }
            }
        };
        if self.mechanism == Mechanism::Lookup {
            self.history.push(x);
        }
        self.time += 1;
        self.position += x as u64;
        x
    }

    /// Advances to time `target` and returns `S_target`.
    pub fn advance_to(&mut self, target: u64) -> u64 {
        while self.time < target {
            self.step();
        }
        self.position
    }
}

/// A realized path. `positions[k]` is `S_k`, with `positions[0] = 0`;
/// `steps[k - 1]` is `X_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WalkPath {
    pub steps: Vec<u8>,
    pub positions: Vec<u64>,
}

impl WalkPath {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn position(&self, k: usize) -> u64 {
        self.positions[k]
    }

    pub fn last(&self) -> u64 {
        *self.positions.last().expect("positions always holds S_0")
    }

    /// Checks `S_0 = 0`, `S_k = S_{k-1} + X_k`, `X_k ∈ {0, 1}`.
    pub fn is_valid(&self) -> bool {
        self.positions.len() == self.steps.len() + 1
            && self.positions[0] == 0
            && self
                .steps
                .iter()
                .zip(self.positions.windows(2))
                .enumerate()
                .all(|(i, (&x, w))| x <= 1 && w[1] == w[0] + x as u64 && w[1] <= i as u64 + 1)
    }
}

pub fn simulate_walk(
    params: &ModelParams,
    n: usize,
    stream: RngStreamSpec,
    mechanism: Mechanism,
) -> Result<WalkPath> {
    if n == 0 {
        return Err(Error::arg("walk length must be at least 1"));
    }
    let mut walker = Walker::new(*params, stream, mechanism);
    let mut steps = Vec::with_capacity(n);
    let mut positions = Vec::with_capacity(n + 1);
    positions.push(0);
    for _ in 0..n {
        steps.push(walker.step() as u8);
        positions.push(walker.position());
    }
    Ok(WalkPath { steps, positions })
}
