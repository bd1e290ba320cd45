use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Asymptotic regime of the walk, fixed by the memory parameter `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Diffusive,
    Critical,
    Superdiffusive,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Diffusive => "diffusive",
            Regime::Critical => "critical",
            Regime::Superdiffusive => "superdiffusive",
        })
    }
}

/// Parameters `(s, q, p)` of the walk.
///
/// `s` is the probability of a first step to the right, `q` the probability
/// of moving after recalling a 0 and `p` after recalling a 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    s: f64,
    q: f64,
    p: f64,
    alpha: f64,
}

impl ModelParams {
    /// Accepts `0 < s < 1`, `0 < q <= 1`, `0 <= p <= 1`. The pair
    /// `(q, p) = (1, 0)` is rejected because it gives `alpha = -1`, where the
    /// coefficient `a_2 = 1 / (1 + alpha)` is infinite.
    pub fn new(s: f64, q: f64, p: f64) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::InvalidParams(format!("s = {s} must lie in (0, 1)")));
        }
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::InvalidParams(format!("q = {q} must lie in (0, 1]")));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParams(format!("p = {p} must lie in [0, 1]")));
        }
        let alpha = p - q;
        if alpha <= -1.0 {
            return Err(Error::InvalidParams(format!(
                "q = {q}, p = {p} gives alpha = {alpha}; alpha must exceed -1"
            )));
        }
        // p - q rounds to 1 when q is below machine precision
        if alpha >= 1.0 {
            return Err(Error::InvalidParams(format!(
                "q = {q} is too small to resolve alpha = p - q < 1"
            )));
        }
        Ok(Self { s, q, p, alpha })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `p - q`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Exact comparison of `alpha` against `1/2`.
    pub fn regime(&self) -> Regime {
        classify_regime(self)
    }

    /// Long-run frequency of right moves, `q / (1 - alpha)`.
    pub fn drift(&self) -> f64 {
        self.q / (1.0 - self.alpha)
    }

    /// Probability that the step after time `m` is a 1, given `S_m = position`.
    #[inline]
    pub fn move_probability(&self, m: u64, position: u64) -> f64 {
        self.q + self.alpha * position as f64 / m as f64
    }

    pub(crate) fn require(&self, regime: Regime, operation: &'static str) -> Result<()> {
        let found = self.regime();
        if found == regime {
            return Ok(());
        }
        let condition = match regime {
            Regime::Diffusive => "alpha < 1/2",
            Regime::Critical => "alpha = 1/2",
            Regime::Superdiffusive => "alpha > 1/2",
        };
        Err(Error::RegimeMismatch {
            operation,
            required: match regime {
                Regime::Diffusive => "diffusive",
                Regime::Critical => "critical",
                Regime::Superdiffusive => "superdiffusive",
            },
            condition,
            alpha: self.alpha,
            found,
        })
    }
}

pub fn classify_regime(params: &ModelParams) -> Regime {
    let a = params.alpha();
    if a < 0.5 {
        Regime::Diffusive
    } else if a == 0.5 {
        Regime::Critical
    } else {
        Regime::Superdiffusive
    }
}
