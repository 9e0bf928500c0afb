//! Command-line front end: `analyze`, `fit`, `simulate` and `verify`.
//!
//! Structured reports are JSON, sample arrays are CSV. Verdicts are data, so
//! `analyze` exits 0 whatever it concludes; only errors are nonzero. `verify`
//! exits 3 when a check fails; usage errors exit 2.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::classify::{
    self, Classification, LampertiCoefficients, MomentReport, Verdict, DEFAULT_TOL,
};
use crate::drift::{self, check_regime, AsymptoticCoefficients, RegimeTag};
use crate::error::{Error, Result};
use crate::lyapunov::{self, LyapunovSpec, VerificationReport};
use crate::markov_core::{Direction, PoissonSolution};
use crate::model::{self, ChainModel, ModelSpec, Shifted, State, ValidationReport};
use crate::sim::{self, DiagnosticParams, DiagnosticReport, EmpiricalCall, TailEstimate};

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Half-width of the band around `theta*` accepted for a simulated tail exponent.
pub const TAIL_BAND: f64 = 0.12;
/// Largest coefficient difference tolerated between an asserted document and a kernel fit.
pub const COEFF_MATCH_TOL: f64 = 1e-4;

#[derive(Parser, Debug)]
#[command(
    name = "halfstrip",
    version,
    about = "Recurrence classification and passage-time moments for half-strip Markov chains"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct GlobalOpts {
    /// Master seed for every random draw
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the main output here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Boundary band for centering and for the |U| = V decision (default 1e-9)
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Assert the refined rate hypotheses, turning |U| = V into null recurrence
    #[arg(long, global = true)]
    pub refined: bool,
    /// Worker threads for simulation (0 = all cores); outputs do not depend on it
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
}

impl GlobalOpts {
    fn tol(&self) -> f64 {
        self.tol.unwrap_or(DEFAULT_TOL)
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify a model or coefficient document and report passage-time moments
    Analyze {
        /// Model JSON (crw, tabular or coefficients)
        model: PathBuf,
    },
    /// Fit asymptotic coefficients from a kernel
    Fit {
        /// Model JSON (crw or tabular)
        model: PathBuf,
    },
    /// Sample passage times below a level
    Simulate(SimulateArgs),
    /// Cross-check the analytic verdict against fits, Lyapunov ratios and simulation
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct SimulateArgs {
    /// Model JSON (crw or tabular)
    #[arg(long)]
    pub model: PathBuf,
    /// Start state as POSITION,LABEL
    #[arg(long, value_parser = parse_start)]
    pub start: (f64, i64),
    /// Passage level: sampling stops once X <= level
    #[arg(long)]
    pub level: f64,
    /// Censoring cap in steps
    #[arg(long, default_value_t = sim::DEFAULT_CAP)]
    pub cap: u64,
    /// Number of samples
    #[arg(long)]
    pub n: usize,
    /// Also write a JSON summary with the censored fraction and tail estimate
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// Model JSON (crw or tabular)
    pub model: PathBuf,
    /// Asserted coefficients JSON to compare against the kernel fit
    #[arg(long)]
    pub coefficients: Option<PathBuf>,
    /// Emit the Lyapunov ratio table as CSV instead of the JSON report
    #[arg(long)]
    pub lyapunov: bool,
    /// Lyapunov exponent nu
    #[arg(long, default_value_t = 1.0)]
    pub nu: f64,
    /// Lyapunov weights b, comma separated (default: a strict-drift choice)
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub b: Option<Vec<f64>>,
    /// Run the simulation checks
    #[arg(long)]
    pub sim: bool,
    /// Simulation start state as POSITION,LABEL
    #[arg(long, value_parser = parse_start, default_value = "50,1")]
    pub start: (f64, i64),
    /// Simulation passage level
    #[arg(long, default_value_t = 10.0)]
    pub level: f64,
    /// Smallest censoring cap; the diagnostic doubles it twice
    #[arg(long, default_value_t = 250_000)]
    pub cap: u64,
    /// Number of passage samples
    #[arg(long, default_value_t = 4000)]
    pub n: usize,
}

fn parse_start(s: &str) -> std::result::Result<(f64, i64), String> {
    let (x, l) = s
        .split_once(',')
        .ok_or_else(|| format!("expected POSITION,LABEL, got {s:?}"))?;
    let x: f64 = x.trim().parse().map_err(|e| format!("position: {e}"))?;
    let l: i64 = l.trim().parse().map_err(|e| format!("label: {e}"))?;
    Ok((x, l))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelEcho {
    pub sha256: String,
    pub description: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub tol: f64,
    pub refined: bool,
    /// Taken from `SOURCE_DATE_EPOCH` so that reports stay reproducible; absent otherwise.
    pub timestamp: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub model_echo: ModelEcho,
    pub coefficients: AsymptoticCoefficients<f64>,
    /// Drift-eliminating shift; absent under constant drift.
    pub transform: Option<PoissonSolution<f64>>,
    pub lamperti: Option<LampertiCoefficients<f64>>,
    pub classification: Classification<f64>,
    /// Absent under constant drift.
    pub moments: Option<MomentReport<f64>>,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub model_echo: ModelEcho,
    pub coefficients: AsymptoticCoefficients<f64>,
    pub regime: RegimeTag,
    pub validation: ValidationReport,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub model_echo: ModelEcho,
    pub n: usize,
    pub cap: u64,
    pub start: (f64, i64),
    pub level: f64,
    pub censored_fraction: f64,
    pub tail: Option<TailEstimate>,
    pub tail_error: Option<String>,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub model_echo: ModelEcho,
    pub verdict: Verdict,
    pub checks: Vec<Check>,
    pub lyapunov: Option<VerificationReport>,
    pub diagnostic: Option<DiagnosticReport>,
    pub tail: Option<TailEstimate>,
    pub passed: bool,
    pub provenance: Provenance,
}

struct Loaded {
    spec: ModelSpec,
    echo: ModelEcho,
}

fn load(path: &Path) -> Result<Loaded> {
    let bytes = fs::read(path)?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    let spec = ModelSpec::from_json(text)?;
    let digest = Sha256::digest(&bytes);
    let sha256 = digest.iter().map(|b| format!("{b:02x}")).collect();
    let echo = ModelEcho {
        sha256,
        description: spec.description(),
    };
    Ok(Loaded { spec, echo })
}

fn kernel_of(loaded: &Loaded) -> Result<ChainModel> {
    loaded.spec.build()?.ok_or_else(|| {
        Error::Invalid("this command needs a kernel (crw or tabular), not bare coefficients".into())
    })
}

fn provenance(g: &GlobalOpts) -> Provenance {
    Provenance {
        tool: TOOL.to_string(),
        version: VERSION.to_string(),
        seed: g.seed,
        tol: g.tol(),
        refined: g.refined,
        timestamp: std::env::var("SOURCE_DATE_EPOCH")
            .ok()
            .and_then(|v| v.trim().parse().ok()),
    }
}

fn coefficients_of(loaded: &Loaded) -> Result<AsymptoticCoefficients<f64>> {
    match &loaded.spec {
        ModelSpec::Coefficients(c) => c.build(),
        _ => drift::fit_asymptotics(&kernel_of(loaded)?, &drift::default_grid()),
    }
}

/// Full pipeline: coefficients, regime, shift, classification, moments.
pub fn cmd_analyze(model_path: &Path, g: &GlobalOpts) -> Result<AnalysisReport> {
    let loaded = load(model_path)?;
    let coefficients = coefficients_of(&loaded)?;
    let tol = g.tol();
    let classification = classify::classify(&coefficients, g.refined, tol)?;
    let (transform, lamperti, moments) = if classification.regime == RegimeTag::ConstantDrift {
        (None, None, None)
    } else {
        let (lc, a) = classify::transform_generalized(&coefficients, tol)?;
        // finite-support kernels bound every jump moment
        let m = classify::moment_threshold(classification.u, classification.v, None)?;
        (Some(a), Some(lc), Some(m))
    };
    Ok(AnalysisReport {
        model_echo: loaded.echo,
        coefficients,
        transform,
        lamperti,
        classification,
        moments,
        provenance: provenance(g),
    })
}

pub fn cmd_fit(model_path: &Path, g: &GlobalOpts) -> Result<FitReport> {
    let loaded = load(model_path)?;
    let model = kernel_of(&loaded)?;
    let coefficients = drift::fit_asymptotics(&model, &drift::default_grid())?;
    let regime = check_regime(&coefficients, g.tol());
    Ok(FitReport {
        model_echo: loaded.echo,
        coefficients,
        regime,
        validation: model::validate(&model, 2.0),
        provenance: provenance(g),
    })
}

/// Passage-time samples as CSV bytes plus a summary.
pub fn cmd_simulate(args: &SimulateArgs, g: &GlobalOpts) -> Result<(Vec<u8>, SimulationSummary)> {
    let loaded = load(&args.model)?;
    let model = kernel_of(&loaded)?;
    let start = State::new(args.start.0, model.label_index(args.start.1)?);
    let samples = sim::with_threads(g.threads, || {
        sim::sample_passage_times(&model, start, args.level, args.cap, args.n, g.seed)
    })??;
    let csv = sim::samples_to_csv(&samples)?;
    let (tail, tail_error) = match sim::tail_exponent(&samples) {
        Ok(t) => (Some(t), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let summary = SimulationSummary {
        model_echo: loaded.echo,
        n: args.n,
        cap: args.cap,
        start: args.start,
        level: args.level,
        censored_fraction: sim::censored_fraction(&samples),
        tail,
        tail_error,
        provenance: provenance(g),
    };
    Ok((csv, summary))
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn coefficient_gap(
    a: &AsymptoticCoefficients<f64>,
    b: &AsymptoticCoefficients<f64>,
) -> Result<f64> {
    if a.labels != b.labels {
        return Err(Error::Dimension(format!(
            "labels {:?} vs {:?}",
            a.labels, b.labels
        )));
    }
    let mut gap = max_gap(&a.d, &b.d)
        .max(max_gap(&a.e, &b.e))
        .max(max_gap(&a.t2, &b.t2));
    for i in 0..a.dim() {
        gap = gap
            .max(max_gap(&a.d_cross[i], &b.d_cross[i]))
            .max(max_gap(&a.gamma[i], &b.gamma[i]))
            .max(max_gap(a.q_limit.row(i), b.q_limit.row(i)));
    }
    Ok(gap)
}

fn expected_call(v: Verdict) -> Option<EmpiricalCall> {
    match v {
        Verdict::PositiveRecurrent => Some(EmpiricalCall::ReturningWithStableMean),
        Verdict::NullRecurrent | Verdict::BoundaryNullRecurrent => {
            Some(EmpiricalCall::ReturningWithDivergingMean)
        }
        Verdict::Transient => Some(EmpiricalCall::Escaping),
        Verdict::Indeterminate => None,
    }
}

/// Lyapunov ratios on the shifted chain `(X + a_eta, eta)`.
pub fn lyapunov_check(
    model: &ChainModel,
    coefficients: &AsymptoticCoefficients<f64>,
    nu: f64,
    b: Option<Vec<f64>>,
    tol: f64,
) -> Result<VerificationReport> {
    let (lc, a) = classify::transform_generalized(coefficients, tol)?;
    let b = match b {
        Some(b) => b,
        None => {
            let mean = lc.pi.weighted_sum(&lyapunov::drift_weights(&lc, nu));
            let dir = if mean >= 0.0 {
                Direction::Positive
            } else {
                Direction::Negative
            };
            lyapunov::choose_b(&lc, nu, dir)?
        }
    };
    let spec = LyapunovSpec::new(nu, b)?;
    let shifted = Shifted::new(model, a.values.clone())?;
    lyapunov::verify_drift_estimate(&shifted, &lc, &spec, &drift::default_grid())
}

pub fn cmd_verify(args: &VerifyArgs, g: &GlobalOpts) -> Result<VerifyReport> {
    let loaded = load(&args.model)?;
    let model = kernel_of(&loaded)?;
    let tol = g.tol();
    let fitted = drift::fit_asymptotics(&model, &drift::default_grid())?;
    let classification = classify::classify(&fitted, g.refined, tol)?;
    let mut checks = Vec::new();

    checks.push(Check {
        name: "fit-residuals".into(),
        passed: !fitted.fit_warning,
        detail: format!("{:?}", fitted.fit_residuals),
    });

    if let Some(path) = &args.coefficients {
        let asserted = coefficients_of(&load(path)?)?;
        let gap = coefficient_gap(&asserted, &fitted)?;
        let theirs = classify::classify(&asserted, g.refined, tol);
        let same_verdict = matches!(&theirs, Ok(c) if c.verdict == classification.verdict);
        checks.push(Check {
            name: "asserted-coefficients".into(),
            passed: gap <= COEFF_MATCH_TOL && same_verdict,
            detail: format!(
                "max coefficient gap {gap:e} (tolerance {COEFF_MATCH_TOL:e}); asserted verdict {}; fitted verdict {}",
                match &theirs {
                    Ok(c) => c.verdict.to_string(),
                    Err(e) => format!("error: {e}"),
                },
                classification.verdict
            ),
        });
    }

    let mut lyap = None;
    if classification.regime != RegimeTag::ConstantDrift {
        let report = lyapunov_check(&model, &fitted, args.nu, args.b.clone(), tol)?;
        checks.push(Check {
            name: "lyapunov-ratio".into(),
            passed: report.passed,
            detail: format!(
                "nu = {}, b = {:?}, final |ratio - 1| = {:?}; {}",
                report.nu,
                report.b,
                report.final_error,
                report.notes.join("; ")
            ),
        });
        lyap = Some(report);
    }

    let (mut diagnostic, mut tail) = (None, None);
    if args.sim {
        let start = State::new(args.start.0, model.label_index(args.start.1)?);
        let params = DiagnosticParams {
            start,
            level: args.level,
            cap: args.cap,
            doublings: 2,
            n: args.n,
            seed: g.seed,
            horizon: 0,
            paths: 0,
        };
        let (report, samples) = sim::with_threads(g.threads, || {
            sim::recurrence_diagnostic_with_samples(&model, params)
        })??;
        let want = expected_call(classification.verdict);
        checks.push(Check {
            name: "simulation-diagnostic".into(),
            passed: want == Some(report.call),
            detail: format!(
                "verdict {} expects {:?}, simulation says {:?} ({})",
                classification.verdict, want, report.call, report.rule
            ),
        });
        if matches!(
            classification.verdict,
            Verdict::NullRecurrent | Verdict::BoundaryNullRecurrent
        ) {
            let theta = (classification.v - classification.u) / (2.0 * classification.v);
            match sim::tail_exponent(&samples) {
                Ok(t) => {
                    checks.push(Check {
                        name: "tail-exponent".into(),
                        passed: (t.exponent - theta).abs() <= TAIL_BAND,
                        detail: format!(
                            "estimate {} vs theta* {theta} (band {TAIL_BAND})",
                            t.exponent
                        ),
                    });
                    tail = Some(t);
                }
                Err(e) => checks.push(Check {
                    name: "tail-exponent".into(),
                    passed: false,
                    detail: e.to_string(),
                }),
            }
        }
        diagnostic = Some(report);
    }

    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        model_echo: loaded.echo,
        verdict: classification.verdict,
        checks,
        lyapunov: lyap,
        diagnostic,
        tail,
        passed,
        provenance: provenance(g),
    })
}

fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => fs::write(p, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_vec_pretty(value)?;
    s.push(b'\n');
    Ok(s)
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> Result<i32> {
    let g = &cli.global;
    if let Some(t) = g.tol {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::Invalid(format!("--tol {t} must be finite and >= 0")));
        }
    }
    match &cli.command {
        Command::Analyze { model } => emit(&g.out, &json(&cmd_analyze(model, g)?)?)?,
        Command::Fit { model } => emit(&g.out, &json(&cmd_fit(model, g)?)?)?,
        Command::Simulate(args) => {
            let (csv, summary) = cmd_simulate(args, g)?;
            emit(&g.out, &csv)?;
            if let Some(p) = &args.summary {
                fs::write(p, json(&summary)?)?;
            }
        }
        Command::Verify(args) => {
            let report = cmd_verify(args, g)?;
            if args.lyapunov {
                let table = report.lyapunov.as_ref().ok_or_else(|| {
                    Error::Invalid("no Lyapunov table under constant drift".into())
                })?;
                emit(&g.out, table.to_csv()?.as_bytes())?;
            } else {
                emit(&g.out, &json(&report)?)?;
            }
            for c in &report.checks {
                eprintln!(
                    "{} {}: {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            if !report.passed {
                return Ok(3);
            }
        }
    }
    Ok(0)
}
