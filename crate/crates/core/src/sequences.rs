//! Deterministic coefficient sequences of the walk's martingale.
//!
//! `gamma_k = (k + alpha) / k`, `a_1 = 1`, `a_{n+1} = a_n / gamma_n`,
//! `A_n = sum a_k`, `v_n = sum a_k^2`, `f_n = a_n^2 / v_n`, and
//! `M_n = a_n S_n - q A_n` is a martingale. Everything is built from the
//! multiplicative recurrence; `a_n = Γ(n)Γ(alpha+1)/Γ(n+alpha)` is never
//! evaluated directly because `Γ(n)` overflows near `n = 171`.

use std::f64::consts::FRAC_PI_4;

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::params::{ModelParams, Regime};
use crate::walk::WalkPath;

/// Largest horizon that [`SequenceCache::build`] materializes.
pub const MAX_MATERIALIZED: usize = 10_000_000;

/// One term of the sequences at index `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SequenceTerm {
    pub n: u64,
    pub gamma: f64,
    pub a: f64,
    pub big_a: f64,
    pub v: f64,
    pub f: f64,
}

/// Constant-memory generator of [`SequenceTerm`]s for `n = 1, 2, ...`.
#[derive(Debug, Clone)]
pub struct SequenceStream {
    alpha: f64,
    next: SequenceTerm,
}

impl SequenceStream {
    pub fn new(params: &ModelParams) -> Self {
        let alpha = params.alpha();
        Self {
            alpha,
            next: SequenceTerm {
                n: 1,
                gamma: 1.0 + alpha,
                a: 1.0,
                big_a: 1.0,
                v: 1.0,
                f: 1.0,
            },
        }
    }
}

impl Iterator for SequenceStream {
    type Item = SequenceTerm;

    fn next(&mut self) -> Option<SequenceTerm> {
        let cur = self.next;
        let n = cur.n + 1;
        let a = cur.a / cur.gamma;
        let v = cur.v + a * a;
        self.next = SequenceTerm {
            n,
            gamma: (n as f64 + self.alpha) / n as f64,
            a,
            big_a: cur.big_a + a,
            v,
            f: a * a / v,
        };
        Some(cur)
    }
}

/// Terms at every multiple of `every` up to `horizon`, plus `horizon` itself.
pub fn checkpoints(params: &ModelParams, horizon: u64, every: u64) -> Vec<SequenceTerm> {
    let every = every.max(1);
    SequenceStream::new(params)
        .take_while(|t| t.n <= horizon)
        .filter(|t| t.n % every == 0 || t.n == horizon)
        .collect()
}

/// Materialized sequences up to a horizon `N`. Immutable once built.
#[derive(Debug, Clone)]
pub struct SequenceCache {
    alpha: f64,
    gamma: Vec<f64>,
    a: Vec<f64>,
    big_a: Vec<f64>,
    v: Vec<f64>,
    f: Vec<f64>,
}

impl SequenceCache {
    pub fn build(params: &ModelParams, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::arg("sequence horizon must be at least 1"));
        }
        if horizon > MAX_MATERIALIZED {
            return Err(Error::arg(format!(
                "horizon {horizon} exceeds {MAX_MATERIALIZED}; use SequenceStream or checkpoints"
            )));
        }
        let mut cache = Self {
            alpha: params.alpha(),
            gamma: Vec::with_capacity(horizon),
            a: Vec::with_capacity(horizon),
            big_a: Vec::with_capacity(horizon),
            v: Vec::with_capacity(horizon),
            f: Vec::with_capacity(horizon),
        };
        for t in SequenceStream::new(params).take(horizon) {
            cache.gamma.push(t.gamma);
            cache.a.push(t.a);
            cache.big_a.push(t.big_a);
            cache.v.push(t.v);
            cache.f.push(t.f);
        }
        Ok(cache)
    }

    pub fn horizon(&self) -> usize {
        self.a.len()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `gamma_k`, `k >= 1`.
    pub fn gamma(&self, k: usize) -> f64 {
        self.gamma[k - 1]
    }

    /// `a_n`, `n >= 1`.
    pub fn a(&self, n: usize) -> f64 {
        self.a[n - 1]
    }

    /// `A_n`, with `A_0 = 0`.
    pub fn big_a(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.big_a[n - 1]
        }
    }

    /// `v_n`, with `v_0 = 0`.
    pub fn v(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.v[n - 1]
        }
    }

    /// `f_n`, `n >= 1`.
    pub fn f(&self, n: usize) -> f64 {
        self.f[n - 1]
    }

    pub fn term(&self, n: usize) -> SequenceTerm {
        SequenceTerm {
            n: n as u64,
            gamma: self.gamma(n),
            a: self.a(n),
            big_a: self.big_a(n),
            v: self.v(n),
            f: self.f(n),
        }
    }
}

/// Limits the sequences and the walk's fluctuations converge to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitConstants {
    pub sigma2: f64,
    /// `lim v_n / n^(1 - 2 alpha)`; diffusive regime only.
    pub ell: Option<f64>,
    /// `lim v_n / log n` in the critical regime.
    pub critical_v_limit: f64,
    /// `lim A_n / (n a_n)`.
    pub mean_ratio_limit: f64,
}

impl LimitConstants {
    pub fn new(params: &ModelParams) -> Self {
        let alpha = params.alpha();
        let ell = (params.regime() == Regime::Diffusive)
            .then(|| (2.0 * ln_gamma(alpha + 1.0)).exp() / (1.0 - 2.0 * alpha));
        Self {
            sigma2: sigma_squared(params),
            ell,
            critical_v_limit: FRAC_PI_4,
            mean_ratio_limit: 1.0 / (1.0 - alpha),
        }
    }
}

/// Asymptotic variance `q(1-p)/(1-alpha)^2` of the martingale increments.
pub fn sigma_squared(params: &ModelParams) -> f64 {
    let one_minus = 1.0 - params.alpha();
    params.q() * (1.0 - params.p()) / (one_minus * one_minus)
}

/// `M_n` computed both as `a_n S_n - q A_n` and as `sum a_k eps_k`.
#[derive(Debug, Clone, Serialize)]
pub struct MartingaleTrack {
    /// `direct[n] = a_n S_n - q A_n`, `direct[0] = 0`.
    pub direct: Vec<f64>,
    /// `from_increments[n] = sum_{k<=n} a_k eps_k`.
    pub from_increments: Vec<f64>,
    /// `eps[k - 1] = X_k - (q + alpha S_{k-1}/(k-1))`, with `eps_1 = X_1 - q`.
    pub eps: Vec<f64>,
    pub max_discrepancy: f64,
}

pub fn martingale_track(
    path: &WalkPath,
    cache: &SequenceCache,
    params: &ModelParams,
) -> Result<MartingaleTrack> {
    let n = path.len();
    if cache.horizon() < n {
        return Err(Error::Horizon {
            requested: n,
            available: cache.horizon(),
        });
    }
    let q = params.q();
    let mut direct = Vec::with_capacity(n + 1);
    let mut from_increments = Vec::with_capacity(n + 1);
    let mut eps = Vec::with_capacity(n);
    direct.push(0.0);
    from_increments.push(0.0);
    let mut acc = 0.0;
    let mut max_discrepancy: f64 = 0.0;
    for k in 1..=n {
        let prev = path.position(k - 1);
        let mean = if k == 1 {
            q
        } else {
            params.move_probability(k as u64 - 1, prev)
        };
        let e = path.steps[k - 1] as f64 - mean;
        eps.push(e);
        acc += cache.a(k) * e;
        let d = cache.a(k) * path.position(k) as f64 - q * cache.big_a(k);
        max_discrepancy = max_discrepancy.max((d - acc).abs());
        direct.push(d);
        from_increments.push(acc);
    }
    Ok(MartingaleTrack {
        direct,
        from_increments,
        eps,
        max_discrepancy,
    })
}

/// Rescaled sequences whose limits are known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    /// `|A_n/(n a_n) - 1/(1-alpha)| * n^(1-alpha)`; stays bounded.
    RatioDeviation,
    /// `v_n / n^(1 - 2 alpha)` → `ell`.
    DiffusiveVariance,
    /// `n f_n` → `1 - 2 alpha`.
    DiffusiveExplosion,
    /// `v_n / log n` → `pi/4`.
    CriticalVariance,
    /// `n log n f_n` → 1.
    CriticalExplosion,
}

impl DiagnosticKind {
    pub fn name(&self) -> &'static str {
        match self {
            DiagnosticKind::RatioDeviation => "ratio_deviation",
            DiagnosticKind::DiffusiveVariance => "v_over_n_pow",
            DiagnosticKind::DiffusiveExplosion => "n_f",
            DiagnosticKind::CriticalVariance => "v_over_logn",
            DiagnosticKind::CriticalExplosion => "n_logn_f",
        }
    }

    fn regime(&self) -> Option<Regime> {
        match self {
            DiagnosticKind::RatioDeviation => None,
            DiagnosticKind::DiffusiveVariance | DiagnosticKind::DiffusiveExplosion => {
                Some(Regime::Diffusive)
            }
            DiagnosticKind::CriticalVariance | DiagnosticKind::CriticalExplosion => {
                Some(Regime::Critical)
            }
        }
    }

    /// Kinds that apply to a regime.
    pub fn for_regime(regime: Regime) -> Vec<DiagnosticKind> {
        use DiagnosticKind::*;
        match regime {
            Regime::Diffusive => vec![RatioDeviation, DiffusiveVariance, DiffusiveExplosion],
            Regime::Critical => vec![RatioDeviation, CriticalVariance, CriticalExplosion],
            Regime::Superdiffusive => vec![RatioDeviation],
        }
    }

    pub fn target(&self, params: &ModelParams) -> Option<f64> {
        let c = LimitConstants::new(params);
        match self {
            DiagnosticKind::RatioDeviation => None,
            DiagnosticKind::DiffusiveVariance => c.ell,
            DiagnosticKind::DiffusiveExplosion => Some(1.0 - 2.0 * params.alpha()),
            DiagnosticKind::CriticalVariance => Some(c.critical_v_limit),
            DiagnosticKind::CriticalExplosion => Some(1.0),
        }
    }

    pub fn evaluate(&self, term: &SequenceTerm, alpha: f64) -> f64 {
        let n = term.n as f64;
        match self {
            DiagnosticKind::RatioDeviation => {
                (term.big_a / (n * term.a) - 1.0 / (1.0 - alpha)).abs() * n.powf(1.0 - alpha)
            }
            DiagnosticKind::DiffusiveVariance => term.v / n.powf(1.0 - 2.0 * alpha),
            DiagnosticKind::DiffusiveExplosion => n * term.f,
            DiagnosticKind::CriticalVariance => term.v / n.ln(),
            DiagnosticKind::CriticalExplosion => n * n.ln() * term.f,
        }
    }

    fn check(&self, params: &ModelParams) -> Result<()> {
        match self.regime() {
            Some(r) => params.require(r, self.name()),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticSeries {
    pub kind: DiagnosticKind,
    pub target: Option<f64>,
    pub points: Vec<(u64, f64)>,
}

impl DiagnosticSeries {
    pub fn last(&self) -> Option<f64> {
        self.points.last().map(|p| p.1)
    }

    /// Whether `|value - target|` is nonincreasing for grid points beyond
    /// `burn_in`. Reported, not enforced.
    pub fn monotone_after(&self, burn_in: u64) -> Option<bool> {
        let target = self.target?;
        let gaps: Vec<f64> = self
            .points
            .iter()
            .filter(|(n, _)| *n > burn_in)
            .map(|(_, v)| (v - target).abs())
            .collect();
        Some(gaps.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)))
    }
}

/// Log-spaced integers in `[lo, hi]` with `per_decade` points per decade;
/// always contains both ends.
pub fn log_grid(lo: u64, hi: u64, per_decade: u32) -> Vec<u64> {
    let lo = lo.max(1);
    let mut out = vec![lo];
    let steps = ((hi as f64 / lo as f64).log10() * per_decade as f64).ceil() as u32;
    for i in 1..=steps {
        let x = (lo as f64 * 10f64.powf(i as f64 / per_decade as f64)).round() as u64;
        let x = x.min(hi);
        if x > *out.last().unwrap() {
            out.push(x);
        }
    }
    if *out.last().unwrap() < hi {
        out.push(hi);
    }
    out
}

fn grid_start(kind: DiagnosticKind) -> u64 {
    // log 1 = 0
    match kind {
        DiagnosticKind::CriticalVariance | DiagnosticKind::CriticalExplosion => 2,
        _ => 1,
    }
}

/// One diagnostic on a log grid of the cache's horizon.
pub fn diagnostic(
    cache: &SequenceCache,
    params: &ModelParams,
    kind: DiagnosticKind,
) -> Result<DiagnosticSeries> {
    kind.check(params)?;
    let horizon = cache.horizon() as u64;
    let points = if horizon < grid_start(kind) {
        Vec::new()
    } else {
        log_grid(grid_start(kind), horizon, 10)
            .into_iter()
            .map(|n| (n, kind.evaluate(&cache.term(n as usize), params.alpha())))
            .collect()
    };
    Ok(DiagnosticSeries {
        kind,
        target: kind.target(params),
        points,
    })
}

/// Every diagnostic that applies to the regime of `params`.
pub fn sequence_asymptotics(
    cache: &SequenceCache,
    params: &ModelParams,
) -> Result<Vec<DiagnosticSeries>> {
    DiagnosticKind::for_regime(params.regime())
        .into_iter()
        .map(|k| diagnostic(cache, params, k))
        .collect()
}

/// Same as [`sequence_asymptotics`] but in constant memory, for horizons
/// beyond [`MAX_MATERIALIZED`].
pub fn sequence_asymptotics_streaming(params: &ModelParams, horizon: u64) -> Vec<DiagnosticSeries> {
    let kinds = DiagnosticKind::for_regime(params.regime());
    let grid = log_grid(1, horizon, 10);
    let mut series: Vec<DiagnosticSeries> = kinds
        .iter()
        .map(|&kind| DiagnosticSeries {
            kind,
            target: kind.target(params),
            points: Vec::new(),
        })
        .collect();
    let mut next = grid.iter().peekable();
    for term in SequenceStream::new(params).take_while(|t| t.n <= horizon) {
        if next.peek() != Some(&&term.n) {
            continue;
        }
        next.next();
        for s in series.iter_mut() {
            if term.n >= grid_start(s.kind) {
                s.points
                    .push((term.n, s.kind.evaluate(&term, params.alpha())));
            }
        }
    }
    series
}
