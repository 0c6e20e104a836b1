//! CSV tables and JSON sidecars.

use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::boundaries::{
    boundaries_finite_freq, boundary_low_freq, g1c_i, g1c_iv, g1c_round, BoundaryKind, BoundaryValue, SolveFor,
};
use crate::detection::{BoundaryCurve, ScanPoint, ScanResult};
use crate::error::{Error, Result};
use crate::model::{Param, ParamPoint};
use crate::semiclassical::SemiclassicalLandscape;

use super::config::{print_config, SweepConfig};
use super::grid::PhaseDiagramGrid;

const OBSERVABLE_COLUMNS: [&str; 17] = [
    "energy",
    "sigma_z",
    "sigma_x",
    "x_mean",
    "x_plus",
    "x_minus",
    "rho_plus",
    "rho_minus",
    "x_tilde_plus",
    "x_tilde_minus",
    "parity",
    "truncation",
    "quasi_degenerate",
    "depleted",
    "converged",
    "label",
    "error",
];

/// Shortest representation that parses back to the same double.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn point_fields(p: &ScanPoint, label: Option<&str>) -> Vec<String> {
    let o = p.observables.as_ref();
    let g = |f: fn(&crate::observables::ObservableSet) -> f64| opt(o.map(f));
    vec![
        opt(p.energy),
        g(|o| o.sigma_z),
        g(|o| o.sigma_x),
        g(|o| o.x_mean),
        g(|o| o.x_plus),
        g(|o| o.x_minus),
        g(|o| o.rho_plus),
        g(|o| o.rho_minus),
        g(|o| o.x_tilde_plus),
        g(|o| o.x_tilde_minus),
        g(|o| o.parity),
        p.truncation.to_string(),
        p.quasi_degenerate.to_string(),
        o.map(|o| o.depleted.to_string()).unwrap_or_default(),
        p.error.is_none().to_string(),
        label.unwrap_or("").to_string(),
        p.error.clone().unwrap_or_default(),
    ]
}

fn to_csv(header: &[String], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).map_err(|e| Error::Io(e.to_string()))?;
    for r in rows {
        w.write_record(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

/// One row per cell, axis values first.
pub fn grid_csv(grid: &PhaseDiagramGrid) -> Result<String> {
    let mut header: Vec<String> = grid.axes.iter().map(|a| a.param.key().to_string()).collect();
    header.extend(OBSERVABLE_COLUMNS.iter().map(|s| s.to_string()));
    let rows: Vec<Vec<String>> = grid
        .cells
        .iter()
        .map(|c| {
            let mut r: Vec<String> = c.coords.iter().map(|&v| fmt_f64(v)).collect();
            r.extend(point_fields(&c.point, c.label.map(|l| l.key())));
            r
        })
        .collect();
    to_csv(&header, &rows)
}

pub fn scan_csv(scan: &ScanResult) -> Result<String> {
    let mut header = vec![scan.axis.param.key().to_string()];
    header.extend(OBSERVABLE_COLUMNS.iter().map(|s| s.to_string()));
    let rows: Vec<Vec<String>> = scan
        .points
        .iter()
        .map(|p| {
            let mut r = vec![fmt_f64(p.value)];
            r.extend(point_fields(p, None));
            r
        })
        .collect();
    to_csv(&header, &rows)
}

/// One row per detected boundary point.
pub fn curves_csv(curves: &[BoundaryCurve]) -> Result<String> {
    let Some(first) = curves.first() else {
        return to_csv(&["curve".to_string()], &[]);
    };
    let header: Vec<String> = [
        "curve",
        first.trace_param.key(),
        first.scan_axis.param.key(),
        "order",
        "signal",
        "delta_sigma_z",
        "refined",
        "broken",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let mut rows = Vec::new();
    for (i, c) in curves.iter().enumerate() {
        for p in &c.points {
            let t = &p.transition;
            rows.push(vec![
                i.to_string(),
                fmt_f64(p.trace_value),
                fmt_f64(t.location),
                serde_json::to_value(t.order).map(|v| v.as_str().unwrap_or("").to_string()).unwrap_or_default(),
                serde_json::to_value(t.signal).map(|v| v.as_str().unwrap_or("").to_string()).unwrap_or_default(),
                fmt_f64(t.delta_sigma_z),
                t.refined.to_string(),
                c.broken.to_string(),
            ]);
        }
    }
    to_csv(&header, &rows)
}

pub fn landscape_csv(l: &SemiclassicalLandscape, potentials: &[(f64, f64)]) -> Result<String> {
    let header: Vec<String> = ["x", "energy", "v_plus", "v_minus"].iter().map(|s| s.to_string()).collect();
    let rows: Vec<Vec<String>> = l
        .samples
        .iter()
        .zip(potentials)
        .map(|(&(x, e), &(vp, vm))| vec![fmt_f64(x), fmt_f64(e), fmt_f64(vp), fmt_f64(vm)])
        .collect();
    to_csv(&header, &rows)
}

/// Closed-form boundary values at one trace value, in the units of the scan
/// parameter. Forms whose domain excludes the point are left out.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlayPoint {
    pub trace_value: f64,
    pub values: Vec<BoundaryValue>,
}

pub fn analytic_overlay(base: &ParamPoint, scan: Param, trace: Param, trace_values: &[f64]) -> Vec<OverlayPoint> {
    trace_values
        .iter()
        .map(|&t| {
            let point = base.with(trace, t);
            let mut values = Vec::new();
            if let Ok(p) = point.resolve() {
                let to_units = |v: f64| v / p.unit_scale(point.unit(scan));
                let mut push = |r: Result<BoundaryValue>, stark: bool| {
                    if let Ok(mut b) = r {
                        if stark {
                            b.value /= 1.0 + p.chi;
                        }
                        b.value = to_units(b.value);
                        if b.value.is_finite() {
                            values.push(b);
                        }
                    }
                };
                match scan {
                    Param::G1 => {
                        if p.eps == 0.0 {
                            push(g1c_round(&p).map(|v| BoundaryValue { kind: BoundaryKind::Round, value: v, validity: "eps = 0, low frequency".into() }), false);
                        } else {
                            push(boundary_low_freq(&p, SolveFor::G1), false);
                        }
                        push(g1c_i(&p), false);
                        push(g1c_iv(&p), false);
                    }
                    Param::Eps => {
                        push(boundary_low_freq(&p, SolveFor::Eps), false);
                        if let Ok(b) = boundaries_finite_freq(&p, SolveFor::Eps) {
                            for v in [b.ii, b.iii, b.iv] {
                                push(Ok(v), false);
                            }
                        }
                    }
                    Param::G2 => {
                        if let Ok(b) = boundaries_finite_freq(&p, SolveFor::G2) {
                            for v in [b.ii, b.iii, b.iv] {
                                push(Ok(v), true);
                            }
                        }
                    }
                    _ => {}
                }
            }
            OverlayPoint { trace_value: t, values }
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct Sidecar<'a, T: Serialize> {
    pub version: &'static str,
    pub timestamp_unix: u64,
    pub config: &'a SweepConfig,
    pub config_text: String,
    pub data: T,
}

pub fn sidecar_json<T: Serialize>(cfg: &SweepConfig, data: T) -> Result<String> {
    let timestamp_unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let sc = Sidecar { version: env!("CARGO_PKG_VERSION"), timestamp_unix, config: cfg, config_text: print_config(cfg), data };
    serde_json::to_string_pretty(&sc).map_err(|e| Error::Io(e.to_string()))
}

/// Writes `contents` under `dir`, creating the directory if needed.
pub fn write_output(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), contents)?;
    Ok(())
}
