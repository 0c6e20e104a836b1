//! Command-line front end of the `rabi` binary.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::detection::{detect_transitions, scan_1d, trace_boundary, DetectOptions, TransitionPoint};
use crate::eigensolve::{converged_ground, SolverOptions};
use crate::error::Error;
use crate::observables::{compute_observables, ObservableSet};
use crate::semiclassical::{landscape_auto, potentials, StationaryPoint};
use crate::sweep::export::landscape_csv;
use crate::sweep::{
    analytic_overlay, curves_csv, grid_csv, read_config, scan_csv, sidecar_json, validate_config, write_output,
    run_grid, SweepConfig, Task,
};
use crate::verify::{property_suite, run_suite, Check, SUITES};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

/// Fraction of failed cells above which a run reports a solver failure.
pub const FAILURE_BUDGET: f64 = 0.1;

#[derive(Debug, Parser)]
#[command(name = "rabi", version, about = "Ground-state phase analysis of the biased quantum Rabi model")]
struct Cli {
    /// Configuration file (key = value lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for CSV and JSON files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; falls back to RABI_WORKERS, then the available cores.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Relative energy tolerance of the eigensolver.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ground state and observables at one parameter point.
    Ground,
    /// One-axis scan with transition detection.
    Scan,
    /// Phase-diagram grid over up to two axes.
    Diagram,
    /// Trace boundaries: first axis scanned, second axis traced.
    Boundary {
        /// Add closed-form boundary values at every trace value.
        #[arg(long)]
        analytic: bool,
    },
    /// Semiclassical energy landscape and its stationary points.
    Semiclassical,
    /// Reference checks.
    Verify {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        suite: Option<String>,
    },
}

impl Command {
    fn task(&self) -> Task {
        match self {
            Command::Ground => Task::Ground,
            Command::Scan => Task::Scan,
            Command::Diagram => Task::Diagram,
            Command::Boundary { .. } => Task::Boundary,
            Command::Semiclassical => Task::Semiclassical,
            Command::Verify { .. } => Task::Verify,
        }
    }
}

enum Failure {
    Config(String),
    Solver(String),
    Verify,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. }
            | Error::Validation(_)
            | Error::NonPositiveFrequency { .. }
            | Error::UnboundedSpectrum { .. } => Failure::Config(e.to_string()),
            _ => Failure::Solver(e.to_string()),
        }
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            EXIT_CONFIG
        }
        Err(Failure::Solver(m)) => {
            eprintln!("error: {m}");
            EXIT_SOLVER
        }
        Err(Failure::Verify) => EXIT_VERIFY,
    }
}

fn load_config(cli: &Cli) -> Result<SweepConfig, Failure> {
    let task = cli.command.task();
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
            read_config(&text)?
        }
        None if task == Task::Verify => SweepConfig { task, ..SweepConfig::default() },
        None => return Err(Failure::Config("--config is required".into())),
    };
    cfg.task = task;
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    if let Some(t) = cli.tol {
        cfg.tol = t;
    }
    if let Some(out) = &cli.out {
        cfg.out = Some(out.clone());
    }
    if let Command::Boundary { analytic: true } = cli.command {
        cfg.analytic = true;
    }
    if let Command::Verify { suite: Some(s) } = &cli.command {
        cfg.suite = Some(s.clone());
    }
    validate_config(&cfg)?;
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    let cfg = load_config(cli)?;
    match cfg.task {
        Task::Ground => ground(&cfg),
        Task::Scan => scan(&cfg),
        Task::Diagram => diagram(&cfg),
        Task::Boundary => boundary(&cfg),
        Task::Semiclassical => semiclassical(&cfg),
        Task::Verify => verify(&cfg),
    }
}

fn detect_options(cfg: &SweepConfig) -> DetectOptions {
    DetectOptions {
        jump_threshold: cfg.jump_threshold,
        peak_factor: cfg.peak_factor,
        solver: SolverOptions::default().with_tol(cfg.tol),
        workers: cfg.workers,
        ..DetectOptions::default()
    }
}

fn emit(cfg: &SweepConfig, name: &str, csv: Option<String>, data: impl Serialize) -> Result<(), Failure> {
    let Some(dir) = &cfg.out else { return Ok(()) };
    if let Some(csv) = csv {
        write_output(dir, &format!("{name}.csv"), &csv)?;
    }
    write_output(dir, &format!("{name}.json"), &sidecar_json(cfg, data)?)?;
    Ok(())
}

fn print_transitions(found: &[TransitionPoint]) {
    for t in found {
        let order = serde_json::to_value(t.order).unwrap_or_default();
        let signal = serde_json::to_value(t.signal).unwrap_or_default();
        println!(
            "  {:.8e}  {}  {}  dsz={:.4}{}",
            t.location,
            order.as_str().unwrap_or(""),
            signal.as_str().unwrap_or(""),
            t.delta_sigma_z,
            if t.refined { "" } else { "  (unrefined)" }
        );
    }
}

#[derive(Serialize)]
struct GroundReport {
    energy: f64,
    truncation: usize,
    residual_norm: f64,
    tail_weight: f64,
    escalations: usize,
    gap: Option<f64>,
    quasi_degenerate: bool,
    observables: Option<ObservableSet>,
}

fn ground(cfg: &SweepConfig) -> Result<(), Failure> {
    let p = cfg.base.resolve()?;
    let sol = converged_ground(&p, &SolverOptions::default().with_tol(cfg.tol))?;
    let obs = compute_observables(&sol, &p);
    println!("E = {:.10} (absolute units)", sol.energy);
    println!("E/Omega = {:.4}", sol.energy / p.splitting);
    match &obs {
        Ok(o) => {
            println!("sigma_z = {:.4}", o.sigma_z);
            println!("sigma_x = {:.4}", o.sigma_x);
            println!("x_tilde = ({:.4}, {:.4})", o.x_tilde_plus, o.x_tilde_minus);
            println!("parity = {:.4}", o.parity);
        }
        Err(e) => eprintln!("warning: {e}"),
    }
    println!("truncation = {} levels, residual = {:.2e}", sol.truncation_used, sol.residual_norm);
    let report = GroundReport {
        energy: sol.energy,
        truncation: sol.truncation_used,
        residual_norm: sol.residual_norm,
        tail_weight: sol.tail_weight,
        escalations: sol.escalations,
        gap: sol.gap,
        quasi_degenerate: sol.quasi_degenerate,
        observables: obs.ok(),
    };
    emit(cfg, "ground", None, report)
}

fn scan(cfg: &SweepConfig) -> Result<(), Failure> {
    let opts = detect_options(cfg);
    let result = scan_1d(&cfg.base, &cfg.axes[0], &opts.solver)?;
    let found = detect_transitions(&result, &opts);
    println!("{} points, {} transitions", result.points.len(), found.len());
    print_transitions(&found);
    emit(cfg, "scan", Some(scan_csv(&result)?), &found)?;
    let failed = 1.0 - result.completion();
    if failed > FAILURE_BUDGET {
        return Err(Failure::Solver(format!("{:.1}% of points failed", 100.0 * failed)));
    }
    Ok(())
}

fn diagram(cfg: &SweepConfig) -> Result<(), Failure> {
    let grid = run_grid(cfg);
    println!("{} cells, {} failed", grid.cells.len(), grid.failed());
    #[derive(Serialize)]
    struct Summary {
        cells: usize,
        failed: usize,
        bands: crate::sweep::PhaseBands,
    }
    emit(cfg, "diagram", Some(grid_csv(&grid)?), Summary { cells: grid.cells.len(), failed: grid.failed(), bands: grid.bands })?;
    if grid.failure_fraction() > FAILURE_BUDGET {
        return Err(Failure::Solver(format!("{:.1}% of cells failed", 100.0 * grid.failure_fraction())));
    }
    Ok(())
}

fn boundary(cfg: &SweepConfig) -> Result<(), Failure> {
    let opts = detect_options(cfg);
    let (scan_axis, trace_axis) = (&cfg.axes[0], &cfg.axes[1]);
    let curves = trace_boundary(&cfg.base, scan_axis, trace_axis, &opts)?;
    println!("{} curves", curves.len());
    for (i, c) in curves.iter().enumerate() {
        println!("  curve {i}: {} points{}", c.points.len(), if c.broken { ", broken" } else { "" });
    }
    let overlay = cfg
        .analytic
        .then(|| analytic_overlay(&cfg.base, scan_axis.param, trace_axis.param, &trace_axis.values()));
    #[derive(Serialize)]
    struct Data<'a> {
        curves: &'a [crate::detection::BoundaryCurve],
        overlay: Option<Vec<crate::sweep::export::OverlayPoint>>,
    }
    emit(cfg, "boundary", Some(curves_csv(&curves)?), Data { curves: &curves, overlay })
}

fn semiclassical(cfg: &SweepConfig) -> Result<(), Failure> {
    let p = cfg.base.resolve()?;
    let l = landscape_auto(&p, cfg.points)?;
    for s in &l.stationary_points {
        let kind = serde_json::to_value(s.kind).unwrap_or_default();
        println!("  {:<10} x = {:.6}  energy = {:.10}", kind.as_str().unwrap_or(""), s.x, s.energy);
    }
    let pots = l.samples.iter().map(|&(x, _)| potentials(&p, x)).collect::<Result<Vec<_>, _>>()?;
    #[derive(Serialize)]
    struct Data<'a> {
        stationary_points: &'a [StationaryPoint],
        labels: Option<(f64, f64, f64)>,
    }
    emit(cfg, "semiclassical", Some(landscape_csv(&l, &pots)?), Data { stationary_points: &l.stationary_points, labels: l.labels })
}

fn verify(cfg: &SweepConfig) -> Result<(), Failure> {
    let checks: Vec<Check> = match &cfg.suite {
        Some(name) => run_suite(name, cfg.workers).ok_or_else(|| Failure::Config(format!("unknown suite {name:?}")))?,
        None => property_suite(),
    };
    for c in &checks {
        println!("{} [{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.id, c.name, c.detail);
    }
    emit(cfg, "verify", None, &checks)?;
    if checks.iter().all(|c| c.passed) {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}
