//! Configuration, grid execution and persistence.

pub mod config;
pub mod export;
pub mod grid;

pub use config::{parse_config, print_config, read_config, validate_config, PhaseBands, SweepConfig, Task};
pub use export::{analytic_overlay, curves_csv, grid_csv, scan_csv, sidecar_json, write_output};
pub use grid::{phase_label, run_grid, GridCell, PhaseDiagramGrid, PhaseLabel};
