//! Plain-text `key = value` sweep configuration.
//!
//! ```text
//! # comment
//! task = diagram
//! omega = 0.01
//! eps = 0
//! axis.g1 = 0:2:41
//! axis.g2 = 1e-4:1e-1:31:log
//! units.eps = gt
//! ```

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::detection::Axis;
use crate::error::{Error, Result};
use crate::model::{Param, ParamPoint, Unit};
use crate::parallel::default_workers;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Ground,
    Scan,
    Diagram,
    Boundary,
    Semiclassical,
    Verify,
}

impl Task {
    pub const ALL: [Task; 6] = [Task::Ground, Task::Scan, Task::Diagram, Task::Boundary, Task::Semiclassical, Task::Verify];

    pub fn key(self) -> &'static str {
        match self {
            Task::Ground => "ground",
            Task::Scan => "scan",
            Task::Diagram => "diagram",
            Task::Boundary => "boundary",
            Task::Semiclassical => "semiclassical",
            Task::Verify => "verify",
        }
    }

    pub fn from_key(s: &str) -> Option<Self> {
        Task::ALL.into_iter().find(|t| t.key() == s)
    }
}

/// `x̃±` banding used to label phases P1 to P4.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseBands {
    /// Both `|x̃±|` below this: centered (P1).
    pub center: f64,
}

impl Default for PhaseBands {
    fn default() -> Self {
        Self { center: 0.25 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub task: Task,
    pub base: ParamPoint,
    /// First axis is scanned (inner, warm-started lane); the second spans rows
    /// or the trace direction.
    pub axes: Vec<Axis>,
    pub tol: f64,
    pub jump_threshold: f64,
    pub peak_factor: f64,
    pub workers: usize,
    pub out: Option<PathBuf>,
    pub bands: PhaseBands,
    pub analytic: bool,
    /// Sample count for semiclassical landscapes.
    pub points: usize,
    pub suite: Option<String>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            task: Task::Ground,
            base: ParamPoint::default(),
            axes: Vec::new(),
            tol: 1e-10,
            jump_threshold: 0.1,
            peak_factor: 5.0,
            workers: default_workers(),
            out: None,
            bands: PhaseBands::default(),
            analytic: false,
            points: 2001,
            suite: None,
        }
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_f64(line: usize, s: &str) -> Result<f64> {
    let v: f64 = s.trim().parse().map_err(|_| parse_err(line, format!("not a number: {s:?}")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("not a finite number: {s:?}")));
    }
    Ok(v)
}

fn parse_usize(line: usize, s: &str) -> Result<usize> {
    s.trim().parse().map_err(|_| parse_err(line, format!("not a non-negative integer: {s:?}")))
}

fn parse_bool(line: usize, s: &str) -> Result<bool> {
    match s.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(parse_err(line, format!("not a boolean: {other:?}"))),
    }
}

fn parse_axis(line: usize, param: Param, s: &str) -> Result<Axis> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    let log = match parts.len() {
        3 => false,
        4 if parts[3] == "log" => true,
        4 if parts[3] == "lin" => false,
        _ => return Err(parse_err(line, format!("axis needs start:stop:count[:log], got {s:?}"))),
    };
    Ok(Axis {
        param,
        start: parse_f64(line, parts[0])?,
        stop: parse_f64(line, parts[1])?,
        count: parse_usize(line, parts[2])?,
        log,
    })
}

/// Parses and validates a configuration.
pub fn parse_config(text: &str) -> Result<SweepConfig> {
    let cfg = read_config(text)?;
    validate_config(&cfg)?;
    Ok(cfg)
}

/// Parses a configuration without the structural checks of
/// [`validate_config`], so callers can override fields first.
pub fn read_config(text: &str) -> Result<SweepConfig> {
    let mut cfg = SweepConfig::default();
    let mut fixed: HashSet<Param> = HashSet::new();
    let mut seen: HashSet<String> = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| parse_err(line, format!("expected key = value, got {content:?}")))?;
        let key = key.trim();
        let value = value.trim();
        if !seen.insert(key.to_string()) {
            return Err(parse_err(line, format!("duplicate key {key:?}")));
        }
        if let Some(name) = key.strip_prefix("axis.") {
            let param = Param::from_key(name).ok_or_else(|| parse_err(line, format!("unknown parameter {name:?}")))?;
            cfg.axes.push(parse_axis(line, param, value)?);
        } else if let Some(name) = key.strip_prefix("units.") {
            let param = Param::from_key(name).ok_or_else(|| parse_err(line, format!("unknown parameter {name:?}")))?;
            let unit = Unit::from_key(value).ok_or_else(|| parse_err(line, format!("unknown unit {value:?}")))?;
            cfg.base.set_unit(param, unit);
        } else if let Some(param) = Param::from_key(key) {
            cfg.base.set(param, parse_f64(line, value)?);
            fixed.insert(param);
        } else {
            match key {
                "task" => {
                    cfg.task = Task::from_key(value).ok_or_else(|| parse_err(line, format!("unknown task {value:?}")))?
                }
                "tol" => cfg.tol = parse_f64(line, value)?,
                "jump_threshold" => cfg.jump_threshold = parse_f64(line, value)?,
                "peak_factor" => cfg.peak_factor = parse_f64(line, value)?,
                "workers" => cfg.workers = parse_usize(line, value)?,
                "out" => cfg.out = Some(PathBuf::from(value)),
                "band.center" => cfg.bands.center = parse_f64(line, value)?,
                "analytic" => cfg.analytic = parse_bool(line, value)?,
                "points" => cfg.points = parse_usize(line, value)?,
                "suite" => cfg.suite = Some(value.to_string()),
                _ => return Err(parse_err(line, format!("unknown key {key:?}"))),
            }
        }
    }
    for axis in &cfg.axes {
        if fixed.contains(&axis.param) {
            return Err(Error::Validation(format!("{} is both fixed and an axis", axis.param)));
        }
    }
    Ok(cfg)
}

/// Structural checks shared by the parser and programmatic construction.
pub fn validate_config(cfg: &SweepConfig) -> Result<()> {
    if cfg.axes.len() > 2 {
        return Err(Error::Validation("at most two axes are supported".into()));
    }
    if cfg.axes.len() == 2 && cfg.axes[0].param == cfg.axes[1].param {
        return Err(Error::Validation("the two axes must differ".into()));
    }
    for axis in &cfg.axes {
        axis.validate()?;
    }
    if !(cfg.tol > 0.0) {
        return Err(Error::Validation("tol must be positive".into()));
    }
    if !(cfg.jump_threshold > 0.0) || !(cfg.peak_factor > 0.0) {
        return Err(Error::Validation("thresholds must be positive".into()));
    }
    if cfg.workers == 0 {
        return Err(Error::Validation("workers must be at least 1".into()));
    }
    if !(cfg.bands.center > 0.0) {
        return Err(Error::Validation("band.center must be positive".into()));
    }
    if cfg.points < 3 {
        return Err(Error::Validation("points must be at least 3".into()));
    }
    let needed = match cfg.task {
        Task::Ground | Task::Semiclassical | Task::Verify => 0..=0,
        Task::Scan => 1..=1,
        Task::Diagram => 0..=2,
        Task::Boundary => 2..=2,
    };
    if !needed.contains(&cfg.axes.len()) {
        return Err(Error::Validation(format!(
            "task {} takes {}..={} axes, got {}",
            cfg.task.key(),
            needed.start(),
            needed.end(),
            cfg.axes.len()
        )));
    }
    Ok(())
}

/// Canonical text form; `parse_config(&print_config(c)) == c`.
pub fn print_config(cfg: &SweepConfig) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "task = {}", cfg.task.key());
    let on_axis = |p: Param| cfg.axes.iter().any(|a| a.param == p);
    for p in Param::ALL {
        if !on_axis(p) {
            let _ = writeln!(s, "{} = {:?}", p.key(), cfg.base.value(p));
        }
        let _ = writeln!(s, "units.{} = {}", p.key(), cfg.base.unit(p).key());
    }
    for a in &cfg.axes {
        let _ = writeln!(s, "axis.{} = {:?}:{:?}:{}{}", a.param.key(), a.start, a.stop, a.count, if a.log { ":log" } else { "" });
    }
    let _ = writeln!(s, "tol = {:?}", cfg.tol);
    let _ = writeln!(s, "jump_threshold = {:?}", cfg.jump_threshold);
    let _ = writeln!(s, "peak_factor = {:?}", cfg.peak_factor);
    let _ = writeln!(s, "workers = {}", cfg.workers);
    if let Some(out) = &cfg.out {
        let _ = writeln!(s, "out = {}", out.display());
    }
    let _ = writeln!(s, "band.center = {:?}", cfg.bands.center);
    let _ = writeln!(s, "analytic = {}", cfg.analytic);
    let _ = writeln!(s, "points = {}", cfg.points);
    if let Some(suite) = &cfg.suite {
        let _ = writeln!(s, "suite = {suite}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_axis_config() {
        let cfg = parse_config("task = scan\nomega=0.1\nOmega=1\naxis.g1=0:2:41").unwrap();
        assert_eq!(cfg.axes, vec![Axis::linear(Param::G1, 0.0, 2.0, 41)]);
        assert_eq!(cfg.base.value(Param::Omega), 0.1);
        assert_eq!(cfg.tol, 1e-10);
        assert_eq!(cfg.jump_threshold, 0.1);
        assert!(cfg.workers >= 1);
    }

    #[test]
    fn log_suffix_on_plain_key_is_a_parse_error() {
        let err = parse_config("omega = 0.1\ng2=1e-4:log\n").unwrap_err();
        assert_eq!(err, Error::Parse { line: 2, message: "not a number: \"1e-4:log\"".into() });
    }

    #[test]
    fn round_boundary_recipe() {
        let text = "# round boundary\ntask = diagram\nomega = 0.01\neps = 0\naxis.g1 = 0:1.5:61\naxis.g2 = -0.95:0.95:39\n";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.task, Task::Diagram);
        assert_eq!(cfg.axes.len(), 2);
        assert_eq!(cfg.base.unit(Param::G1), Unit::Gs);
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(parse_config("g1 = 1\naxis.g1 = 0:1:20\ntask=scan"), Err(Error::Validation(_))));
        assert!(matches!(parse_config("task=scan\naxis.g1 = 0:1:1"), Err(Error::Validation(_))));
        assert!(matches!(parse_config("task=scan\naxis.g1 = 0:1:20:log"), Err(Error::Validation(_))));
        assert!(matches!(parse_config("task=boundary\naxis.g1 = 0:1:20"), Err(Error::Validation(_))));
        assert!(matches!(parse_config("nonsense"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_config("omega = 1\nomega = 2"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_config("units.g1 = furlongs"), Err(Error::Parse { .. })));
    }

    #[test]
    fn print_parse_round_trip() {
        let text = "task = boundary\nomega = 0.001\neps = 40\nunits.eps = gt\naxis.g1 = 0:1.5:76\naxis.g2 = 0.1:0.45:8\nout = results/x\nanalytic = true\nworkers = 3\nsuite = parity\n";
        let cfg = parse_config(text).unwrap();
        let again = parse_config(&print_config(&cfg)).unwrap();
        assert_eq!(cfg, again);
    }
}
