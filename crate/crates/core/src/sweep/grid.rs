//! Parallel evaluation of one- and two-axis parameter grids.

use serde::{Deserialize, Serialize};

use crate::detection::{sample, Axis, ScanPoint};
use crate::eigensolve::{SolverOptions, WarmStart};
use crate::model::ParamPoint;
use crate::observables::ObservableSet;
use crate::parallel::map_ordered;

use super::config::{PhaseBands, SweepConfig};

/// Phase labels from `x̃±` banding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseLabel {
    /// Both components centered.
    P1,
    /// Components displaced to opposite sides.
    P2,
    /// Both components on the negative side.
    P3,
    /// Both components on the positive side.
    P4,
}

impl PhaseLabel {
    pub fn key(self) -> &'static str {
        match self {
            PhaseLabel::P1 => "P1",
            PhaseLabel::P2 => "P2",
            PhaseLabel::P3 => "P3",
            PhaseLabel::P4 => "P4",
        }
    }
}

pub fn phase_label(o: &ObservableSet, bands: &PhaseBands) -> PhaseLabel {
    let (a, b) = (o.x_tilde_plus, o.x_tilde_minus);
    if a.abs() < bands.center && b.abs() < bands.center {
        PhaseLabel::P1
    } else if a * b < 0.0 {
        PhaseLabel::P2
    } else if a + b < 0.0 {
        PhaseLabel::P3
    } else {
        PhaseLabel::P4
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    /// Values along each axis, in axis order.
    pub coords: Vec<f64>,
    pub point: ScanPoint,
    pub label: Option<PhaseLabel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiagramGrid {
    pub base: ParamPoint,
    pub axes: Vec<Axis>,
    pub bands: PhaseBands,
    /// Row-major: rows follow the second axis, columns the first.
    pub cells: Vec<GridCell>,
}

impl PhaseDiagramGrid {
    pub fn failed(&self) -> usize {
        self.cells.iter().filter(|c| c.point.error.is_some()).count()
    }

    pub fn failure_fraction(&self) -> f64 {
        self.failed() as f64 / self.cells.len().max(1) as f64
    }
}

/// Evaluates every cell. Rows run in parallel, cells within a row in sequence
/// with warm starts.
pub fn run_grid(cfg: &SweepConfig) -> PhaseDiagramGrid {
    let solver = SolverOptions::default().with_tol(cfg.tol);
    let columns: Vec<f64> = cfg.axes.first().map_or(vec![f64::NAN], |a| a.values());
    let rows: Vec<f64> = cfg.axes.get(1).map_or(vec![f64::NAN], |a| a.values());
    let base = cfg.base;
    let row_cells = map_ordered(&rows, cfg.workers, |&r| {
        let row_base = match cfg.axes.get(1) {
            Some(a) => base.with(a.param, r),
            None => base,
        };
        let mut warm: Option<WarmStart> = None;
        let mut out = Vec::with_capacity(columns.len());
        for &c in &columns {
            let (point, next) = match cfg.axes.first() {
                Some(a) => sample(&row_base, a.param, c, &solver, warm.as_ref()),
                None => {
                    let p = crate::model::Param::Omega;
                    sample(&row_base, p, row_base.value(p), &solver, None)
                }
            };
            if next.is_some() {
                warm = next;
            }
            let label = point.observables.as_ref().map(|o| phase_label(o, &cfg.bands));
            let coords = match cfg.axes.len() {
                0 => Vec::new(),
                1 => vec![c],
                _ => vec![c, r],
            };
            out.push(GridCell { coords, point, label });
        }
        out
    });
    PhaseDiagramGrid { base, axes: cfg.axes.clone(), bands: cfg.bands, cells: row_cells.into_iter().flatten().collect() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensolve::converged_ground;
    use crate::model::Param;
    use crate::sweep::config::parse_config;

    fn obs(a: f64, b: f64) -> ObservableSet {
        ObservableSet {
            sigma_z: 0.0,
            sigma_x: 0.0,
            x_mean: 0.0,
            x_plus: 0.0,
            x_minus: 0.0,
            rho_plus: 0.5,
            rho_minus: 0.5,
            x_tilde_plus: a,
            x_tilde_minus: b,
            parity: 0.0,
            depleted: false,
        }
    }

    #[test]
    fn banding_rules() {
        let b = PhaseBands::default();
        assert_eq!(phase_label(&obs(0.1, -0.2), &b), PhaseLabel::P1);
        assert_eq!(phase_label(&obs(-0.5, 0.5), &b), PhaseLabel::P2);
        assert_eq!(phase_label(&obs(-0.9, -0.6), &b), PhaseLabel::P3);
        assert_eq!(phase_label(&obs(0.9, 0.95), &b), PhaseLabel::P4);
    }

    #[test]
    fn single_cell_matches_direct_solve() {
        let cfg = parse_config("task = diagram\nomega = 0.1\ng1 = 1.2\neps = 0.001\nworkers = 1").unwrap();
        let grid = run_grid(&cfg);
        assert_eq!(grid.cells.len(), 1);
        let direct = converged_ground(&cfg.base.resolve().unwrap(), &SolverOptions::default()).unwrap();
        assert_eq!(grid.cells[0].point.energy, Some(direct.energy));
    }

    #[test]
    fn grid_is_row_major_and_worker_independent() {
        let text = "task = diagram\nomega = 0.5\naxis.g1 = 0:1.5:3\naxis.eps = 0:0.1:2\n";
        let mut cfg = parse_config(text).unwrap();
        cfg.workers = 1;
        let a = run_grid(&cfg);
        cfg.workers = 3;
        let b = run_grid(&cfg);
        assert_eq!(a, b);
        let coords: Vec<_> = a.cells.iter().map(|c| c.coords.clone()).collect();
        assert_eq!(coords[0], vec![0.0, 0.0]);
        assert_eq!(coords[1], vec![0.75, 0.0]);
        assert_eq!(coords[3], vec![0.0, 0.1]);
        assert_eq!(a.axes[0].param, Param::G1);
    }

    #[test]
    fn failing_cells_are_contained() {
        let text = "task = diagram\nomega = 0.5\naxis.g2 = 0.5:1.5:5\n";
        let grid = run_grid(&parse_config(text).unwrap());
        assert_eq!(grid.cells.len(), 5);
        assert!(grid.failed() >= 2 && grid.failed() < 5);
    }
}
