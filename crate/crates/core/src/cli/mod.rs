//! The `mrw` command line.
//!
//! Every subcommand takes the model parameters `--s --q --p` and a horizon
//! `--n`; the regime is derived from `alpha = p - q` and echoed, never
//! passed. Exit codes: 0 success, 2 configuration error, 3 regime mismatch,
//! 4 I/O error.

pub mod output;

use std::ffi::OsString;
use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Error;
use crate::exact::{exact_distribution, exact_moments, urn_blue_distribution, DP_BOUND};
use crate::harness::{self, MonteCarlo};
use crate::params::{ModelParams, Regime};
use crate::sequences::{log_grid, sigma_squared, DiagnosticKind, SequenceStream, SequenceTerm};
use crate::walk::{simulate_walk, Mechanism};

pub use output::{Cell, SCHEMA_VERSION};

pub const THREADS_ENV: &str = "MRW_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "mrw",
    version,
    about = "Minimal random walk and Pólya urn laboratory"
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Debug, Subcommand)]
enum CliCommand {
    /// Simulate one path and print (k, x, s).
    Simulate(CommonArgs),
    /// Exact law of S_n by dynamic programming.
    Exact(CommonArgs),
    /// Log-weighted empirical measure along one path (or per-replica KS summary).
    Asclt(CommonArgs),
    /// Log-averaged even moments over replicas.
    Qsl(CommonArgs),
    /// Covariance grid of the rescaled position process.
    Fclt(CommonArgs),
    /// Exact urn blue-count law against the walk's law.
    UrnCompare(CommonArgs),
    /// Monte Carlo of the superdiffusive limit.
    Superdiffusive(CommonArgs),
    /// Coefficient sequences on a log grid.
    Sequences(CommonArgs),
}

#[derive(Debug, Clone, Args)]
struct CommonArgs {
    #[arg(long, default_value_t = 0.5)]
    s: f64,
    #[arg(long)]
    q: f64,
    #[arg(long)]
    p: f64,
    /// Horizon; `superdiffusive` accepts `--n-list` instead.
    #[arg(long, required_unless_present = "n_list")]
    n: Option<u64>,
    #[arg(long)]
    replicas: Option<u64>,
    /// Moment order for `qsl`.
    #[arg(long = "r", default_value_t = 1)]
    r_order: u32,
    /// Comma-separated time grid for `fclt`.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    /// Comma-separated horizons for `superdiffusive`.
    #[arg(long = "n-list", value_delimiter = ',')]
    n_list: Option<Vec<u64>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "out", value_enum, default_value_t = OutFormat::Csv)]
    out: OutFormat,
    /// Output file; standard output when omitted.
    #[arg(long = "out-path")]
    out_path: Option<PathBuf>,
    /// Worker threads; 0 means one per core.
    #[arg(long, env = THREADS_ENV, default_value_t = 0)]
    threads: usize,
    #[arg(long, value_enum, default_value_t = Mechanism::Direct)]
    mechanism: Mechanism,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CommandKind {
    Simulate,
    Exact,
    Asclt,
    Qsl,
    Fclt,
    UrnCompare,
    Superdiffusive,
    Sequences,
}

impl CommandKind {
    pub fn name(&self) -> &'static str {
        match self {
            CommandKind::Simulate => "simulate",
            CommandKind::Exact => "exact",
            CommandKind::Asclt => "asclt",
            CommandKind::Qsl => "qsl",
            CommandKind::Fclt => "fclt",
            CommandKind::UrnCompare => "urn-compare",
            CommandKind::Superdiffusive => "superdiffusive",
            CommandKind::Sequences => "sequences",
        }
    }

    fn default_replicas(&self) -> u64 {
        match self {
            CommandKind::Qsl => 200,
            CommandKind::Fclt | CommandKind::Superdiffusive => 1000,
            _ => 1,
        }
    }
}

/// Fully validated experiment description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub command: CommandKind,
    pub params: ModelParams,
    pub n: u64,
    pub replicas: u64,
    pub r_order: u32,
    pub grid: Vec<f64>,
    pub n_list: Vec<u64>,
    pub seed: u64,
    pub out_format: OutFormat,
    pub out_path: Option<PathBuf>,
    pub threads: usize,
    pub mechanism: Mechanism,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(#[from] clap::Error),
    #[error("configuration error: {0}")]
    Config(Error),
    #[error("regime mismatch: {0}")]
    Regime(Error),
    #[error("I/O error: {0}")]
    Io(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(e) => e.exit_code(),
            CliError::Config(_) => 2,
            CliError::Regime(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::RegimeMismatch { .. } => CliError::Regime(e),
            Error::Io(_) => CliError::Io(e),
            other => CliError::Config(other),
        }
    }
}

impl ExperimentConfig {
    /// Parses and validates an argument vector (including the program name).
    pub fn from_args<I, T>(args: I) -> Result<Self, CliError>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        let cli = Cli::try_parse_from(args)?;
        let (command, a) = match cli.command {
            CliCommand::Simulate(a) => (CommandKind::Simulate, a),
            CliCommand::Exact(a) => (CommandKind::Exact, a),
            CliCommand::Asclt(a) => (CommandKind::Asclt, a),
            CliCommand::Qsl(a) => (CommandKind::Qsl, a),
            CliCommand::Fclt(a) => (CommandKind::Fclt, a),
            CliCommand::UrnCompare(a) => (CommandKind::UrnCompare, a),
            CliCommand::Superdiffusive(a) => (CommandKind::Superdiffusive, a),
            CliCommand::Sequences(a) => (CommandKind::Sequences, a),
        };
        let params = ModelParams::new(a.s, a.q, a.p).map_err(CliError::Config)?;
        let regime = params.regime();
        let grid = match command {
            CommandKind::Fclt => a.grid.unwrap_or_else(|| harness::default_grid(regime)),
            _ => a.grid.unwrap_or_default(),
        };
        let n = match (a.n, a.n_list.as_ref().and_then(|l| l.iter().max())) {
            (Some(n), _) => n,
            (None, Some(&max)) if command == CommandKind::Superdiffusive => max,
            _ => return Err(CliError::Config(Error::arg("--n is required"))),
        };
        let n_list = match command {
            CommandKind::Superdiffusive => a.n_list.unwrap_or_else(|| {
                let mut v: Vec<u64> = [n / 100, n / 10, n]
                    .into_iter()
                    .filter(|&x| x > 0)
                    .collect();
                v.dedup();
                v
            }),
            _ => a.n_list.unwrap_or_default(),
        };
        let config = ExperimentConfig {
            command,
            params,
            n,
            replicas: a.replicas.unwrap_or(command.default_replicas()),
            r_order: a.r_order,
            grid,
            n_list,
            seed: a.seed,
            out_format: a.out,
            out_path: a.out_path,
            threads: a.threads,
            mechanism: a.mechanism,
        };
        config.validate()?;
        Ok(config)
    }

    /// Command-specific checks, run before any computation.
    pub fn validate(&self) -> Result<(), CliError> {
        let cfg = |msg: String| CliError::Config(Error::InvalidArgument(msg));
        if self.n == 0 {
            return Err(cfg("--n must be at least 1".into()));
        }
        if self.replicas == 0 {
            return Err(cfg("--replicas must be at least 1".into()));
        }
        let prm = &self.params;
        match self.command {
            CommandKind::Exact | CommandKind::UrnCompare if self.n > DP_BOUND as u64 => {
                return Err(cfg(format!(
                    "--n {} exceeds the exact DP bound {DP_BOUND}",
                    self.n
                )));
            }
            CommandKind::Asclt => {
                if prm.regime() == Regime::Superdiffusive {
                    prm.require(Regime::Diffusive, "almost-sure CLT (diffusive or critical)")?;
                }
                let min = if prm.regime() == Regime::Critical {
                    3
                } else {
                    10
                };
                if self.n < min {
                    return Err(cfg(format!("asclt needs --n >= {min}")));
                }
            }
            CommandKind::Qsl => {
                if prm.regime() == Regime::Superdiffusive {
                    prm.require(
                        Regime::Diffusive,
                        "even-moment strong law (diffusive or critical)",
                    )?;
                }
                if self.r_order == 0 {
                    return Err(cfg("--r must be at least 1".into()));
                }
                if self.n < 3 {
                    return Err(cfg("qsl needs --n >= 3".into()));
                }
            }
            CommandKind::Fclt => {
                if prm.regime() == Regime::Superdiffusive {
                    prm.require(Regime::Diffusive, "functional CLT (diffusive or critical)")?;
                }
                if self.replicas < harness::fclt::MIN_COVARIANCE_REPLICAS {
                    return Err(cfg(format!(
                        "fclt needs --replicas >= {}",
                        harness::fclt::MIN_COVARIANCE_REPLICAS
                    )));
                }
                harness::fclt::check_grid(prm, self.n, &self.grid)?;
            }
            CommandKind::Superdiffusive => {
                prm.require(Regime::Superdiffusive, "superdiffusive almost-sure limit")?;
                if self.n_list.is_empty()
                    || self.n_list[0] == 0
                    || !self.n_list.windows(2).all(|w| w[0] < w[1])
                {
                    return Err(cfg(
                        "--n-list must be positive and strictly increasing".into()
                    ));
                }
                if self.replicas < 2 {
                    return Err(cfg("superdiffusive needs --replicas >= 2".into()));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Result of one command: a table plus scalar summaries.
#[derive(Debug, Clone)]
pub struct Report {
    pub config: ExperimentConfig,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<(String, Cell)>,
    pub diagnostics: Vec<(String, Cell)>,
}

impl Report {
    fn new(config: &ExperimentConfig, columns: &[&str]) -> Self {
        Self {
            config: config.clone(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    fn summary(&mut self, key: &str, value: impl Into<Cell>) {
        self.summary.push((key.to_string(), value.into()));
    }

    fn diagnostic(&mut self, key: &str, value: impl Into<Cell>) {
        self.diagnostics.push((key.to_string(), value.into()));
    }

    pub fn render(&self) -> String {
        match self.config.out_format {
            OutFormat::Csv => output::to_csv(self),
            OutFormat::Json => output::to_json(self),
        }
    }

    /// One line with the headline numbers.
    pub fn summary_line(&self) -> String {
        let parts: Vec<String> = self
            .summary
            .iter()
            .map(|(k, v)| match v {
                Cell::Float(x) => format!("{k}={x:.6}"),
                Cell::Int(i) => format!("{k}={i}"),
                Cell::Text(s) => format!("{k}={s}"),
            })
            .collect();
        format!(
            "mrw {} [{}, alpha={}]: {}",
            self.config.command.name(),
            self.config.params.regime(),
            self.config.params.alpha(),
            parts.join(" ")
        )
    }
}

/// Executes a validated configuration on a pool of `config.threads` workers.
pub fn run(config: &ExperimentConfig) -> Result<Report, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| CliError::Config(Error::arg(format!("thread pool: {e}"))))?;
    pool.install(|| execute(config)).map_err(CliError::from)
}

fn execute(c: &ExperimentConfig) -> Result<Report, Error> {
    let prm = &c.params;
    let mc = MonteCarlo::new(c.seed, c.replicas).with_mechanism(c.mechanism);
    match c.command {
        CommandKind::Simulate => {
            let path = simulate_walk(prm, c.n as usize, mc.stream(0), c.mechanism)?;
            let mut rep = Report::new(c, &["k", "x", "s"]);
            for k in 1..=path.len() {
                rep.rows.push(vec![
                    k.into(),
                    (path.steps[k - 1] as u64).into(),
                    path.position(k).into(),
                ]);
            }
            rep.summary("final_position", path.last());
            rep.summary("mean_step", path.last() as f64 / c.n as f64);
            rep.summary("drift_target", prm.drift());
            Ok(rep)
        }
        CommandKind::Exact => {
            let dist = exact_distribution(prm, c.n as usize)?;
            let mut rep = Report::new(c, &["j", "probability", "cdf"]);
            for (j, (pr, cdf)) in dist.probs.iter().zip(dist.cdf()).enumerate() {
                rep.rows.push(vec![j.into(), (*pr).into(), cdf.into()]);
            }
            rep.summary("mean", dist.mean());
            rep.summary("variance", dist.variance());
            rep.summary("total_mass", dist.total_mass());
            let rec = exact_moments(prm, c.n)?;
            rep.diagnostic("recursion_mean", rec.mean);
            rep.diagnostic("recursion_variance", rec.variance());
            Ok(rep)
        }
        CommandKind::UrnCompare => {
            let walk = exact_distribution(prm, c.n as usize)?;
            let urn = urn_blue_distribution(prm, c.n as usize)?;
            let mut rep = Report::new(c, &["j", "walk_probability", "urn_probability"]);
            for (j, (a, b)) in walk.probs.iter().zip(&urn.probs).enumerate() {
                rep.rows.push(vec![j.into(), (*a).into(), (*b).into()]);
            }
            rep.summary("tv_distance", walk.tv_distance(&urn));
            Ok(rep)
        }
        CommandKind::Asclt => asclt_report(c, &mc),
        CommandKind::Qsl => {
            let est = harness::qsl_mean(prm, c.n, c.r_order, &mc)?;
            let mut rep = Report::new(c, &["replica", "value"]);
            for (i, v) in est.values.iter().enumerate() {
                rep.rows.push(vec![i.into(), (*v).into()]);
            }
            rep.summary("mean", est.mean);
            rep.summary("mean_se", est.mean_se);
            rep.summary("target", est.target);
            rep.summary("relative_error", est.relative_error());
            Ok(rep)
        }
        CommandKind::Fclt => {
            let est = harness::covariance_grid(prm, c.n, &c.grid, &mc)?;
            let mut rep = Report::new(c, &["s", "t", "empirical", "theoretical", "standard_error"]);
            for i in 0..est.grid.len() {
                for j in i..est.grid.len() {
                    rep.rows.push(vec![
                        est.grid[i].into(),
                        est.grid[j].into(),
                        est.empirical[i][j].into(),
                        est.theoretical[i][j].into(),
                        est.standard_errors[i][j].into(),
                    ]);
                }
            }
            rep.summary("max_relative_error", est.max_relative_error());
            Ok(rep)
        }
        CommandKind::Superdiffusive => {
            let est = harness::superdiffusive_limit(prm, &c.n_list, &mc)?;
            let mut rep = Report::new(
                c,
                &[
                    "n",
                    "mean",
                    "mean_se",
                    "variance",
                    "variance_se",
                    "exact_mean",
                    "exact_variance",
                    "cauchy_rms",
                ],
            );
            for e in &est {
                rep.rows.push(vec![
                    e.n.into(),
                    e.mean.into(),
                    e.mean_se.into(),
                    e.variance.into(),
                    e.variance_se.into(),
                    e.exact_mean.into(),
                    e.exact_variance.into(),
                    e.cauchy_rms.into(),
                ]);
            }
            let last = est.last().expect("n_list is nonempty");
            rep.summary("mean", last.mean);
            rep.summary("exact_mean", last.exact_mean);
            rep.summary("variance", last.variance);
            Ok(rep)
        }
        CommandKind::Sequences => Ok(sequences_report(c)),
    }
}

fn asclt_report(c: &ExperimentConfig, mc: &MonteCarlo) -> Result<Report, Error> {
    let prm = &c.params;
    if c.replicas == 1 {
        let m = harness::asclt_measure(prm, c.n, mc.stream(0), c.mechanism)?;
        let mut rep = match &m.storage {
            harness::asclt::Storage::Points { points, weights } => {
                let mut rep = Report::new(c, &["k", "point", "weight"]);
                let first_k = if prm.regime() == Regime::Critical {
                    2
                } else {
                    1
                };
                for (i, (x, w)) in points.iter().zip(weights).enumerate() {
                    rep.rows
                        .push(vec![(first_k + i).into(), (*x).into(), (*w).into()]);
                }
                rep
            }
            harness::asclt::Storage::Binned { .. } => {
                let mut rep = Report::new(c, &["upper_edge", "cumulative_weight"]);
                for (x, cum) in m.cumulative() {
                    rep.rows.push(vec![x.into(), cum.into()]);
                }
                rep
            }
        };
        rep.summary("ks_distance", m.ks_distance().unwrap_or(f64::NAN));
        rep.summary("target_variance", m.target_variance);
        rep.summary("variance", m.variance());
        rep.summary("weight_ratio", m.weight_ratio());
        rep.diagnostic("normalizer", m.normalizer);
        rep.diagnostic("total_weight", m.total_weight);
        return Ok(rep);
    }
    let measures = mc
        .run(|stream| {
            harness::asclt_measure(prm, c.n, stream, c.mechanism).map(|m| {
                (
                    m.ks_distance().unwrap_or(f64::NAN),
                    m.variance(),
                    m.weight_ratio(),
                    m.target_variance,
                )
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>, Error>>()?;
    let mut rep = Report::new(c, &["replica", "ks_distance", "variance", "weight_ratio"]);
    for (i, (ks, var, ratio, _)) in measures.iter().enumerate() {
        rep.rows
            .push(vec![i.into(), (*ks).into(), (*var).into(), (*ratio).into()]);
    }
    let mut ks: Vec<f64> = measures.iter().map(|m| m.0).collect();
    ks.sort_by(f64::total_cmp);
    rep.summary("median_ks_distance", ks[ks.len() / 2]);
    rep.summary("target_variance", measures[0].3);
    Ok(rep)
}

fn sequences_report(c: &ExperimentConfig) -> Report {
    let prm = &c.params;
    let regime = prm.regime();
    let kinds = DiagnosticKind::for_regime(regime);
    let mut columns = vec!["n", "a_n", "A_n", "v_n", "f_n", "v_over_logn"];
    columns.extend(
        kinds
            .iter()
            .filter(|k| **k != DiagnosticKind::CriticalVariance)
            .map(|k| k.name()),
    );
    let mut rep = Report::new(c, &columns);
    let grid = log_grid(1, c.n, 10);
    let mut next = grid.iter().peekable();
    let mut last: Option<SequenceTerm> = None;
    for term in SequenceStream::new(prm).take_while(|t| t.n <= c.n) {
        if next.peek() != Some(&&term.n) {
            continue;
        }
        next.next();
        let v_over_logn = if term.n >= 2 {
            term.v / (term.n as f64).ln()
        } else {
            f64::NAN
        };
        let mut row: Vec<Cell> = vec![
            term.n.into(),
            term.a.into(),
            term.big_a.into(),
            term.v.into(),
            term.f.into(),
            v_over_logn.into(),
        ];
        for k in kinds
            .iter()
            .filter(|k| **k != DiagnosticKind::CriticalVariance)
        {
            let ok = term.n >= 2 || *k != DiagnosticKind::CriticalExplosion;
            row.push(
                if ok {
                    k.evaluate(&term, prm.alpha())
                } else {
                    f64::NAN
                }
                .into(),
            );
        }
        rep.rows.push(row);
        last = Some(term);
    }
    if let Some(t) = last {
        if t.n >= 2 {
            rep.summary("v_over_logn", t.v / (t.n as f64).ln());
        }
        for k in &kinds {
            if let Some(target) = k.target(prm) {
                rep.summary(&format!("{}_target", k.name()), target);
            }
        }
    }
    rep.summary("sigma2", sigma_squared(prm));
    rep
}

/// Writes the rendered report to `out_path` or standard output.
pub fn emit(report: &Report) -> Result<(), CliError> {
    let body = report.render();
    let io = |e: std::io::Error| CliError::Io(Error::Io(e));
    match &report.config.out_path {
        Some(path) => {
            output::write_all(BufWriter::new(File::create(path).map_err(io)?), &body).map_err(io)
        }
        None => output::write_all(std::io::stdout().lock(), &body).map_err(io),
    }
}

/// Entry point shared by the binary and the tests; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let result = ExperimentConfig::from_args(args).and_then(|config| {
        let report = run(&config)?;
        emit(&report)?;
        eprintln!("{}", report.summary_line());
        Ok(())
    });
    match result {
        Ok(()) => 0,
        Err(CliError::Usage(e)) => {
            let _ = e.print();
            e.exit_code()
        }
        Err(e) => {
            eprintln!("mrw: {e}");
            e.exit_code()
        }
    }
}
