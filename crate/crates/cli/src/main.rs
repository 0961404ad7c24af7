//! `qsearch` — command-line surface over the interaction-free Grover
//! search library: single runs, Monte Carlo sampling, baseline
//! comparisons, figure-data export, grid validation, and sweeps.
//!
//! Exit codes: 0 success, 1 runtime/domain error, 2 usage error,
//! 3 validation failure.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qsearch_core::analysis::{fig3_dataset, sweep_dataset, validate_grid, KMaxRule, SweepGrid};
use qsearch_core::baselines::{classical_success, grover_success};
use qsearch_core::circuit::{run_search, search_success};
use qsearch_core::closed_form;
use qsearch_core::monte_carlo::{event_probabilities, monte_carlo};
use qsearch_core::params::{ParamError, SearchParams, Theta};
use qsearch_core::tolerances::EQUIVALENCE_TOLERANCE;

use output::{emit, fmt12, json_doc, sig12, Csv};

#[derive(Parser)]
#[command(
    name = "qsearch",
    version,
    about = "Interaction-free Grover search: simulation, sampling, and analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one search and print per-traversal records.
    Run(RunArgs),
    /// Sample photon histories with a seeded generator and tally outcomes.
    Mc(McArgs),
    /// Classical, ideal-Grover, and interaction-free success at one query budget.
    Compare(CompareArgs),
    /// Export success/survival/amplitude curves for one box count.
    Fig3(Fig3Args),
    /// Cross-validate the closed form against the circuit over a grid.
    Validate(ValidateArgs),
    /// Tabulate closed-form curves over an (N, M) grid.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ThetaMode {
    /// Phase-oracle tuning theta = pi/M.
    #[value(name = "pi-over-m")]
    PiOverM,
    /// Absorbing tuning theta = pi/(2M).
    #[value(name = "pi-over-2m")]
    PiOver2M,
}

/// The equivalence harness is only defined at the phase-oracle tuning.
#[derive(Clone, Copy, ValueEnum)]
enum TunedThetaMode {
    #[value(name = "pi-over-m")]
    PiOverM,
}

#[derive(Args)]
#[group(multiple = false)]
struct AngleArgs {
    /// Per-pass rotation angle in radians.
    #[arg(long)]
    theta: Option<f64>,
    /// Per-pass rotation angle as a preset.
    #[arg(long, value_enum)]
    theta_mode: Option<ThetaMode>,
}

impl AngleArgs {
    fn resolve(&self) -> Option<Theta> {
        match (self.theta, self.theta_mode) {
            (Some(t), None) => Some(Theta::Radians(t)),
            (None, Some(ThetaMode::PiOverM)) => Some(Theta::PiOverM),
            (None, Some(ThetaMode::PiOver2M)) => Some(Theta::PiOver2M),
            _ => None,
        }
    }

    fn require(&self) -> Result<Theta, AppError> {
        self.resolve().ok_or_else(|| {
            AppError::Usage("exactly one of --theta or --theta-mode is required".into())
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct OutArgs {
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Number of boxes N.
    #[arg(long)]
    n: usize,
    /// Passes per traversal M.
    #[arg(long)]
    m: usize,
    /// Number of large cycles k.
    #[arg(long)]
    k: usize,
    /// Index of the box hiding the device.
    #[arg(long, default_value_t = 0)]
    target: usize,
    #[command(flatten)]
    angle: AngleArgs,
    /// Require the closed-form columns (error if they are unavailable).
    #[arg(long)]
    closed_form: bool,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct McArgs {
    /// Number of boxes N.
    #[arg(long)]
    n: usize,
    /// Passes per traversal M.
    #[arg(long)]
    m: usize,
    /// Number of large cycles k.
    #[arg(long)]
    k: usize,
    /// Index of the box hiding the device.
    #[arg(long, default_value_t = 0)]
    target: usize,
    #[command(flatten)]
    angle: AngleArgs,
    /// Number of sampled photon histories.
    #[arg(long)]
    trials: u64,
    /// RNG seed; the same seed replays the same tally.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct CompareArgs {
    /// Number of boxes N.
    #[arg(long)]
    n: usize,
    /// Query budget shared by all three strategies.
    #[arg(long)]
    queries: usize,
    /// Passes per traversal M (with --k, must satisfy queries = k * M).
    #[arg(long)]
    m: Option<usize>,
    /// Number of large cycles k (with --m, must satisfy queries = k * M).
    #[arg(long)]
    k: Option<usize>,
    /// Emit one row for every factorization queries = k * M.
    #[arg(long, conflicts_with_all = ["m", "k"])]
    all_splits: bool,
    #[command(flatten)]
    angle: AngleArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct Fig3Args {
    /// Number of boxes N.
    #[arg(long)]
    n: usize,
    /// Comma-separated pass counts, e.g. 9,12,32.
    #[arg(long, value_delimiter = ',', required = true)]
    m: Vec<usize>,
    /// Largest number of large cycles tabulated (inclusive).
    #[arg(long)]
    k_max: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct ValidateArgs {
    /// Comma-separated box counts (default: the standing grid).
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Comma-separated pass counts (default: the standing grid).
    #[arg(long, value_delimiter = ',')]
    m: Option<Vec<usize>>,
    /// Fixed per-N cap on large cycles (default: ceil(2 sqrt(N))).
    #[arg(long)]
    k_max: Option<usize>,
    /// Angle preset (the comparison is defined at the phase-oracle tuning).
    #[arg(long, value_enum)]
    theta_mode: Option<TunedThetaMode>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated box counts (default: the standing grid).
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Comma-separated pass counts (default: the standing grid).
    #[arg(long, value_delimiter = ',')]
    m: Option<Vec<usize>>,
    /// Fixed per-N cap on large cycles (default: ceil(2 sqrt(N))).
    #[arg(long)]
    k_max: Option<usize>,
    /// Angle preset (closed-form curves are defined at the phase-oracle tuning).
    #[arg(long, value_enum)]
    theta_mode: Option<TunedThetaMode>,
    #[command(flatten)]
    out: OutArgs,
}

enum AppError {
    /// Malformed request (exit 2).
    Usage(String),
    /// Well-formed request the domain cannot satisfy (exit 1).
    Runtime(String),
    /// The validation gate failed (exit 3); details already printed.
    ValidationFailed,
}

/// Name the offending flag instead of echoing library error types.
fn flag_error(e: ParamError) -> AppError {
    let msg = match e {
        ParamError::TooFewBoxes(n) => format!("--n must be at least 2 (got {n})"),
        ParamError::ZeroSmallCycles => "--m must be at least 1 (got 0)".to_string(),
        ParamError::ThetaOutOfRange(t) => {
            format!("--theta must be a finite angle in (0, pi] (got {t})")
        }
        ParamError::TargetOutOfRange { target, n_boxes } => {
            format!("--target must be below --n (got {target} with {n_boxes} boxes)")
        }
        ParamError::ZeroTrials => "--trials must be at least 1".to_string(),
    };
    AppError::Usage(msg)
}

fn configure_threads() -> Result<(), AppError> {
    match std::env::var("QSEARCH_THREADS") {
        Ok(raw) => {
            let n: usize = raw.trim().parse().map_err(|_| {
                AppError::Usage(format!(
                    "QSEARCH_THREADS must be a positive integer (got {raw:?})"
                ))
            })?;
            if n == 0 {
                return Err(AppError::Usage(
                    "QSEARCH_THREADS must be a positive integer (got 0)".into(),
                ));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| AppError::Runtime(format!("thread pool setup failed: {e}")))
        }
        Err(std::env::VarError::NotPresent) => Ok(()),
        Err(e) => Err(AppError::Usage(format!("QSEARCH_THREADS: {e}"))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Mc(a) => cmd_mc(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Fig3(a) => cmd_fig3(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Sweep(a) => cmd_sweep(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(AppError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(AppError::ValidationFailed) => ExitCode::from(3),
    }
}

const RUN_HEADER: &str = "n,m,k,tau,alpha,survival,success,cf_tau,cf_alpha,cf_survival,cf_success";

fn cmd_run(a: RunArgs) -> Result<(), AppError> {
    let theta = a.angle.require()?;
    let params = SearchParams::new(a.n, a.m, theta, a.k, a.target).map_err(flag_error)?;
    // Closed-form columns ride along at the tuned angle; --closed-form
    // forces them (and makes their absence an error instead of a blank).
    let tuned = matches!(theta, Theta::PiOverM);
    let closed = if tuned || a.closed_form {
        match closed_form::evolution(a.n, a.m, params.theta(), a.k) {
            Ok(rows) => Some(rows),
            Err(e) if a.closed_form => {
                return Err(AppError::Runtime(format!("closed form unavailable: {e}")))
            }
            Err(_) => None,
        }
    } else {
        None
    };
    let records = run_search(&params);

    // Row k = 0 is the uniform start; rows k >= 1 come from the circuit.
    let uniform_tau = 1.0 / (a.n as f64).sqrt();
    let circuit_row = |k: usize| -> (f64, f64, f64, f64) {
        if k == 0 {
            (uniform_tau, uniform_tau, 1.0, 1.0 / a.n as f64)
        } else {
            let r = &records[k - 1];
            (r.tau, r.alpha, r.cumulative_survival, r.success_probability)
        }
    };
    let cf_row = |k: usize| closed.as_ref().map(|rows| &rows[k]);

    let content = match a.out.format {
        Format::Csv => {
            let mut csv = Csv::new(RUN_HEADER);
            for k in 0..=a.k {
                let (tau, alpha, survival, success) = circuit_row(k);
                let mut cells = vec![
                    a.n.to_string(),
                    a.m.to_string(),
                    k.to_string(),
                    fmt12(tau),
                    fmt12(alpha),
                    fmt12(survival),
                    fmt12(success),
                ];
                match cf_row(k) {
                    Some(p) => cells.extend([
                        fmt12(p.tau),
                        fmt12(p.alpha),
                        fmt12(p.survival),
                        fmt12(p.success),
                    ]),
                    None => {
                        cells.extend([String::new(), String::new(), String::new(), String::new()])
                    }
                }
                csv.row(&cells);
            }
            csv.finish()
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = (0..=a.k)
                .map(|k| {
                    let (tau, alpha, survival, success) = circuit_row(k);
                    let p = cf_row(k);
                    json!({
                        "n": a.n,
                        "m": a.m,
                        "k": k,
                        "tau": sig12(tau),
                        "alpha": sig12(alpha),
                        "survival": sig12(survival),
                        "success": sig12(success),
                        "cf_tau": p.map(|p| sig12(p.tau)),
                        "cf_alpha": p.map(|p| sig12(p.alpha)),
                        "cf_survival": p.map(|p| sig12(p.survival)),
                        "cf_success": p.map(|p| sig12(p.success)),
                    })
                })
                .collect();
            json_doc(&serde_json::Value::Array(rows))
        }
    };
    emit(a.out.output.as_deref(), &content).map_err(AppError::Runtime)
}

const MC_HEADER: &str = "event,cycle,index,count,frequency,analytic,sigmas";

/// One tally line: an outcome bucket, its observed count, and the exact
/// probability it is judged against. `cycle`/`index` are blank where the
/// event kind has no such coordinate.
struct McRow {
    event: &'static str,
    cycle: Option<usize>,
    index: Option<usize>,
    count: u64,
    analytic: f64,
}

fn cmd_mc(a: McArgs) -> Result<(), AppError> {
    let theta = a.angle.require()?;
    let params = SearchParams::new(a.n, a.m, theta, a.k, a.target).map_err(flag_error)?;
    let tally = monte_carlo(&params, a.trials, a.seed).map_err(flag_error)?;
    let probs = event_probabilities(&params);
    let trials = a.trials as f64;

    let mut rows: Vec<McRow> = Vec::new();
    for (&(cycle, pass), &p) in probs.explosions() {
        rows.push(McRow {
            event: "explosion",
            cycle: Some(cycle),
            index: Some(pass),
            count: tally.explosions().get(&(cycle, pass)).copied().unwrap_or(0),
            analytic: p,
        });
    }
    for (&cycle, &p) in probs.dumps() {
        rows.push(McRow {
            event: "dump",
            cycle: Some(cycle),
            index: None,
            count: tally.dumps().get(&cycle).copied().unwrap_or(0),
            analytic: p,
        });
    }
    for (mode, &p) in probs.detections().iter().enumerate() {
        rows.push(McRow {
            event: "detection",
            cycle: None,
            index: Some(mode),
            count: tally.detection_count(mode),
            analytic: p,
        });
    }

    let sigmas = |count: u64, p: f64| -> f64 {
        let sigma = (p * (1.0 - p) / trials).sqrt();
        let diff = (count as f64 / trials - p).abs();
        if sigma > 0.0 {
            diff / sigma
        } else {
            0.0
        }
    };

    let content = match a.out.format {
        Format::Csv => {
            let mut csv = Csv::new(MC_HEADER);
            for r in &rows {
                csv.row(&[
                    r.event.to_string(),
                    r.cycle.map(|c| c.to_string()).unwrap_or_default(),
                    r.index.map(|i| i.to_string()).unwrap_or_default(),
                    r.count.to_string(),
                    fmt12(r.count as f64 / trials),
                    fmt12(r.analytic),
                    fmt12(sigmas(r.count, r.analytic)),
                ]);
            }
            csv.finish()
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "event": r.event,
                        "cycle": r.cycle,
                        "index": r.index,
                        "count": r.count,
                        "frequency": sig12(r.count as f64 / trials),
                        "analytic": sig12(r.analytic),
                        "sigmas": sig12(sigmas(r.count, r.analytic)),
                    })
                })
                .collect();
            json_doc(&serde_json::Value::Array(rows))
        }
    };
    emit(a.out.output.as_deref(), &content).map_err(AppError::Runtime)
}

const COMPARE_HEADER: &str = "n,queries,m,k,classical,grover,ifm_grover";

fn cmd_compare(a: CompareArgs) -> Result<(), AppError> {
    if a.n < 2 {
        return Err(AppError::Usage(format!(
            "--n must be at least 2 (got {})",
            a.n
        )));
    }
    if a.queries == 0 {
        return Err(AppError::Usage("--queries must be at least 1".into()));
    }
    let splits: Vec<(usize, usize)> = if a.all_splits {
        (1..=a.queries)
            .filter(|&m| a.queries.is_multiple_of(m))
            .map(|m| (m, a.queries / m))
            .collect()
    } else {
        match (a.m, a.k) {
            (Some(m), Some(k)) => {
                if m.checked_mul(k) != Some(a.queries) {
                    return Err(AppError::Usage(format!(
                        "--queries must equal --k times --m ({} != {k} * {m})",
                        a.queries
                    )));
                }
                vec![(m, k)]
            }
            _ => {
                return Err(AppError::Usage(
                    "provide both --m and --k, or --all-splits".into(),
                ))
            }
        }
    };
    let theta = a.angle.resolve().unwrap_or(Theta::PiOverM);
    let classical =
        classical_success(a.n, a.queries).map_err(|e| AppError::Usage(e.to_string()))?;
    let grover = grover_success(a.n, a.queries);

    let mut results = Vec::new();
    for &(m, k) in &splits {
        let params = SearchParams::new(a.n, m, theta, k, 0).map_err(flag_error)?;
        results.push((m, k, search_success(&params)));
    }

    let content = match a.out.format {
        Format::Csv => {
            let mut csv = Csv::new(COMPARE_HEADER);
            for &(m, k, ifm) in &results {
                csv.row(&[
                    a.n.to_string(),
                    a.queries.to_string(),
                    m.to_string(),
                    k.to_string(),
                    fmt12(classical),
                    fmt12(grover),
                    fmt12(ifm),
                ]);
            }
            csv.finish()
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = results
                .iter()
                .map(|&(m, k, ifm)| {
                    json!({
                        "n": a.n,
                        "queries": a.queries,
                        "m": m,
                        "k": k,
                        "classical": sig12(classical),
                        "grover": sig12(grover),
                        "ifm_grover": sig12(ifm),
                    })
                })
                .collect();
            json_doc(&serde_json::Value::Array(rows))
        }
    };
    emit(a.out.output.as_deref(), &content).map_err(AppError::Runtime)
}

const CURVE_HEADER: &str = "n,m,k,tau,survival,success";

fn cmd_fig3(a: Fig3Args) -> Result<(), AppError> {
    let dataset = fig3_dataset(a.n, &a.m, a.k_max)
        .map_err(|e| AppError::Runtime(format!("closed form unavailable: {e}")))?;
    let content = match a.out.format {
        Format::Csv => {
            let mut csv = Csv::new(CURVE_HEADER);
            for r in &dataset.rows {
                csv.row(&[
                    dataset.n_boxes.to_string(),
                    r.small_cycles.to_string(),
                    r.k.to_string(),
                    fmt12(r.tau),
                    fmt12(r.survival),
                    fmt12(r.success),
                ]);
            }
            csv.finish()
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = dataset
                .rows
                .iter()
                .map(|r| {
                    json!({
                        "n": dataset.n_boxes,
                        "m": r.small_cycles,
                        "k": r.k,
                        "tau": sig12(r.tau),
                        "survival": sig12(r.survival),
                        "success": sig12(r.success),
                    })
                })
                .collect();
            json_doc(&serde_json::Value::Array(rows))
        }
    };
    emit(a.out.output.as_deref(), &content).map_err(AppError::Runtime)
}

const STANDING_N: [usize; 7] = [2, 4, 8, 15, 16, 32, 64];
const STANDING_M: [usize; 8] = [2, 3, 4, 8, 9, 12, 16, 32];

fn build_grid(
    n: Option<Vec<usize>>,
    m: Option<Vec<usize>>,
    k_max: Option<usize>,
) -> Result<SweepGrid, AppError> {
    let n_values = n.unwrap_or_else(|| STANDING_N.to_vec());
    let m_values = m.unwrap_or_else(|| STANDING_M.to_vec());
    let rule = k_max
        .map(KMaxRule::Fixed)
        .unwrap_or(KMaxRule::SqrtScaled(2.0));
    SweepGrid::new(n_values, m_values, rule, Theta::PiOverM)
        .map_err(|e| AppError::Usage(e.to_string()))
}

const VALIDATE_HEADER: &str = "n,m,k,diff_tau,diff_survival";

fn cmd_validate(a: ValidateArgs) -> Result<(), AppError> {
    let grid = build_grid(a.n, a.m, a.k_max)?;
    let report = validate_grid(&grid);

    let content = match a.out.format {
        Format::Csv => {
            let mut csv = Csv::new(VALIDATE_HEADER);
            for p in &report.points {
                csv.row(&[
                    p.n_boxes.to_string(),
                    p.small_cycles.to_string(),
                    p.k.to_string(),
                    fmt12(p.diff_tau),
                    fmt12(p.diff_survival),
                ]);
            }
            csv.finish()
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = report
                .points
                .iter()
                .map(|p| {
                    json!({
                        "n": p.n_boxes,
                        "m": p.small_cycles,
                        "k": p.k,
                        "diff_tau": sig12(p.diff_tau),
                        "diff_survival": sig12(p.diff_survival),
                    })
                })
                .collect();
            json_doc(&serde_json::Value::Array(rows))
        }
    };
    emit(a.out.output.as_deref(), &content).map_err(AppError::Runtime)?;

    eprintln!(
        "validate: {} points over {} box counts x {} pass counts",
        report.points.len(),
        report.grid.n_values().len(),
        report.grid.m_values().len()
    );
    for s in &report.skipped {
        eprintln!(
            "validate: skipped (N={}, M={}): {}",
            s.n_boxes, s.small_cycles, s.reason
        );
    }
    match report.worst_point {
        Some((n, m, k)) => eprintln!(
            "validate: max |tau diff| {} / max |survival diff| {} (worst at N={n}, M={m}, k={k})",
            fmt12(report.max_abs_diff_tau),
            fmt12(report.max_abs_diff_survival)
        ),
        None => eprintln!("validate: no comparable points"),
    }
    if report.passed {
        eprintln!("validate: passed (threshold {EQUIVALENCE_TOLERANCE:e})");
        Ok(())
    } else {
        eprintln!("validate: FAILED (threshold {EQUIVALENCE_TOLERANCE:e})");
        Err(AppError::ValidationFailed)
    }
}

fn cmd_sweep(a: SweepArgs) -> Result<(), AppError> {
    let grid = build_grid(a.n, a.m, a.k_max)?;
    let dataset = sweep_dataset(&grid);
    let content = match a.out.format {
        Format::Csv => {
            let mut csv = Csv::new(CURVE_HEADER);
            for r in &dataset.rows {
                csv.row(&[
                    r.n_boxes.to_string(),
                    r.small_cycles.to_string(),
                    r.k.to_string(),
                    fmt12(r.tau),
                    fmt12(r.survival),
                    fmt12(r.success),
                ]);
            }
            csv.finish()
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = dataset
                .rows
                .iter()
                .map(|r| {
                    json!({
                        "n": r.n_boxes,
                        "m": r.small_cycles,
                        "k": r.k,
                        "tau": sig12(r.tau),
                        "survival": sig12(r.survival),
                        "success": sig12(r.success),
                    })
                })
                .collect();
            json_doc(&serde_json::Value::Array(rows))
        }
    };
    emit(a.out.output.as_deref(), &content).map_err(AppError::Runtime)?;
    for s in &dataset.skipped {
        eprintln!(
            "sweep: skipped (N={}, M={}): {}",
            s.n_boxes, s.small_cycles, s.reason
        );
    }
    Ok(())
}
