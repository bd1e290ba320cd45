//! Two-color Pólya urn equivalent to the walk.
//!
//! The first ball is blue with probability `s`. Afterwards a ball is drawn
//! uniformly and put back; a red draw adds blue with probability `q` (red
//! otherwise), a blue draw adds blue with probability `p` (red otherwise).
//! The blue count then evolves like `S_n`.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::rng::RngStreamSpec;

/// Urn composition `(P_n, S_n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct UrnState {
    pub red: u64,
    pub blue: u64,
}

impl UrnState {
    pub fn total(&self) -> u64 {
        self.red + self.blue
    }
}

/// Composition after each of the `n` additions.
pub fn simulate_urn(
    params: &ModelParams,
    n: usize,
    stream: RngStreamSpec,
) -> Result<Vec<UrnState>> {
    if n == 0 {
        return Err(Error::arg("urn run length must be at least 1"));
    }
    let mut rng = stream.rng();
    let mut state = if rng.random::<f64>() < params.s() {
        UrnState { red: 0, blue: 1 }
    } else {
        UrnState { red: 1, blue: 0 }
    };
    let mut out = Vec::with_capacity(n);
    out.push(state);
    for _ in 1..n {
        let drawn_blue = rng.random_range(0..state.total()) < state.blue;
        let add_blue_prob = if drawn_blue { params.p() } else { params.q() };
        if rng.random::<f64>() < add_blue_prob {
            state.blue += 1;
        } else {
            state.red += 1;
        }
        out.push(state);
    }
    Ok(out)
}
