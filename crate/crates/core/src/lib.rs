//! Ground-state analysis of the biased quantum Rabi model with two-photon
//! and Stark couplings.

pub mod banded;
#[cfg(feature = "cli")]
pub mod cli;
pub mod detection;
pub mod boundaries;
pub mod eigensolve;
pub mod error;
pub mod model;
pub mod observables;
pub mod parallel;
pub mod semiclassical;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use model::{validate_params, DerivedScales, ModelParams, Param, ParamPoint, Unit};
