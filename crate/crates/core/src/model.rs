//! Model parameters, derived coupling scales and the truncated Hamiltonian.
//!
//! The Hamiltonian is
//!
//! ```text
//! H = ω a†a + (Ω/2) σx + g1 σz (a† + a) + g2 σz [(a†)² + a² + χ ñ] − ε σz,   ñ = a†a + a a†
//! ```
//!
//! expanded on the Fock ⊗ spin basis with the interleaved ordering
//! `(0,+), (0,−), (1,+), (1,−), …` so the matrix is banded with half-bandwidth 4.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::banded::BandedSymmetricMatrix;
use crate::error::{Error, Result};

/// The six physical parameters, all in absolute energy units except `chi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Boson mode frequency ω.
    pub omega: f64,
    /// Level splitting / tunneling Ω.
    pub splitting: f64,
    /// Linear coupling.
    pub g1: f64,
    /// Two-photon (nonlinear) coupling.
    pub g2: f64,
    /// Dimensionless Stark coefficient.
    pub chi: f64,
    /// Bias.
    pub eps: f64,
}

impl ModelParams {
    /// Uncoupled, unbiased model.
    pub fn new(omega: f64, splitting: f64) -> Self {
        Self { omega, splitting, g1: 0.0, g2: 0.0, chi: 0.0, eps: 0.0 }
    }

    pub fn with_g1(mut self, g1: f64) -> Self {
        self.g1 = g1;
        self
    }

    pub fn with_g2(mut self, g2: f64) -> Self {
        self.g2 = g2;
        self
    }

    pub fn with_chi(mut self, chi: f64) -> Self {
        self.chi = chi;
        self
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    /// QRM critical coupling `√(ωΩ)/2`.
    pub fn g_s(&self) -> f64 {
        (self.omega * self.splitting).sqrt() / 2.0
    }

    /// Bound on the effective nonlinear coupling, `ω/2`.
    pub fn g_t(&self) -> f64 {
        self.omega / 2.0
    }

    /// Stark-scaled nonlinear coupling `(1 + χ) g2`.
    pub fn g2_tilde(&self) -> f64 {
        (1.0 + self.chi) * self.g2
    }

    /// Absolute size of one `unit` at these frequencies.
    pub fn unit_scale(&self, unit: Unit) -> f64 {
        match unit {
            Unit::Abs => 1.0,
            Unit::Splitting => self.splitting,
            Unit::Gs => self.g_s(),
            Unit::Gt => self.g_t(),
        }
    }

    pub fn get(&self, param: Param) -> f64 {
        match param {
            Param::Omega => self.omega,
            Param::Splitting => self.splitting,
            Param::G1 => self.g1,
            Param::G2 => self.g2,
            Param::Chi => self.chi,
            Param::Eps => self.eps,
        }
    }

    pub fn set(&mut self, param: Param, value: f64) {
        match param {
            Param::Omega => self.omega = value,
            Param::Splitting => self.splitting = value,
            Param::G1 => self.g1 = value,
            Param::G2 => self.g2 = value,
            Param::Chi => self.chi = value,
            Param::Eps => self.eps = value,
        }
    }
}

/// Scales derived from validated parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedScales {
    pub g_s: f64,
    pub g_t: f64,
    pub g2_tilde: f64,
    /// `√2 g1 / ω`
    pub g1_prime: f64,
    /// `2 g2 / ω`
    pub g2_prime: f64,
    /// `(1 + χ) g2′`
    pub g2_tilde_prime: f64,
}

/// Checks physical admissibility and returns the derived scales.
pub fn validate_params(p: &ModelParams) -> Result<DerivedScales> {
    if !(p.omega > 0.0 && p.omega.is_finite()) || !(p.splitting > 0.0 && p.splitting.is_finite()) {
        return Err(Error::NonPositiveFrequency { omega: p.omega, splitting: p.splitting });
    }
    let g_t = p.g_t();
    let g2_tilde = p.g2_tilde();
    if !(g2_tilde.abs() < g_t) {
        return Err(Error::UnboundedSpectrum { g2_tilde: g2_tilde.abs(), g_t });
    }
    if !(p.g1.is_finite() && p.eps.is_finite() && p.chi.is_finite()) {
        return Err(Error::Validation("coupling parameters must be finite".into()));
    }
    let g2_prime = 2.0 * p.g2 / p.omega;
    Ok(DerivedScales {
        g_s: p.g_s(),
        g_t,
        g2_tilde,
        g1_prime: std::f64::consts::SQRT_2 * p.g1 / p.omega,
        g2_prime,
        g2_tilde_prime: (1.0 + p.chi) * g2_prime,
    })
}

/// σz eigenvalue label; `Up` is `s = +1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn sign(self) -> f64 {
        match self {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        }
    }
}

/// Position of `|n, s⟩` in the interleaved basis.
pub fn basis_index(n: usize, spin: Spin) -> usize {
    2 * n + if spin == Spin::Up { 0 } else { 1 }
}

/// Truncated Hamiltonian on Fock levels `0..=n_max` for both spins.
pub fn build_hamiltonian(p: &ModelParams, n_max: usize) -> Result<BandedSymmetricMatrix> {
    validate_params(p)?;
    if n_max < 2 {
        return Err(Error::TruncationTooSmall(n_max));
    }
    let levels = n_max + 1;
    let dim = 2 * levels;
    let mut diag = vec![0.0; dim];
    let mut tunnel = vec![0.0; dim - 1];
    let mut linear = vec![0.0; dim - 2];
    let mut squeeze = vec![0.0; dim - 4];
    for n in 0..levels {
        let nf = n as f64;
        for spin in [Spin::Up, Spin::Down] {
            let s = spin.sign();
            let i = basis_index(n, spin);
            diag[i] = p.omega * nf + s * p.g2 * p.chi * (2.0 * nf + 1.0) - s * p.eps;
            if n + 1 < levels {
                linear[i] = s * p.g1 * (nf + 1.0).sqrt();
            }
            if n + 2 < levels {
                squeeze[i] = s * p.g2 * ((nf + 1.0) * (nf + 2.0)).sqrt();
            }
        }
        tunnel[basis_index(n, Spin::Up)] = p.splitting / 2.0;
    }
    Ok(BandedSymmetricMatrix::from_bands(
        dim,
        vec![(0, diag), (1, tunnel), (2, linear), (4, squeeze)],
    ))
}

/// Initial Fock truncation for the escalation loop: `max(32, ⌈8 x0²⌉)` with
/// `x0` the larger of the two spin-potential displacements.
pub fn estimate_truncation(p: &ModelParams) -> usize {
    let Ok(d) = validate_params(p) else {
        return 32;
    };
    let x0 = [1.0 + d.g2_tilde_prime, 1.0 - d.g2_tilde_prime]
        .iter()
        .map(|den| (d.g1_prime / den).abs())
        .fold(0.0, f64::max);
    let raw = 8.0 * x0 * x0;
    // Absorb rounding noise so exact integers are not bumped up by one.
    let n = (raw * (1.0 - 1e-12)).ceil();
    if n.is_finite() {
        (n as usize).max(32)
    } else {
        usize::MAX
    }
}

/// Applies the parity operation `|n, ±⟩ → (−1)^n |n, ∓⟩` to a state vector.
/// The bare ground state (`c_{0,+} = −c_{0,−}`) has eigenvalue −1.
pub fn apply_parity(v: &[f64]) -> Vec<f64> {
    assert!(v.len() % 2 == 0);
    let mut out = vec![0.0; v.len()];
    for n in 0..v.len() / 2 {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let up = basis_index(n, Spin::Up);
        let down = basis_index(n, Spin::Down);
        out[up] = sign * v[down];
        out[down] = sign * v[up];
    }
    out
}

/// A named model parameter, as used by scan axes and configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Param {
    Omega,
    Splitting,
    G1,
    G2,
    Chi,
    Eps,
}

impl Param {
    pub const ALL: [Param; 6] =
        [Param::Omega, Param::Splitting, Param::G1, Param::G2, Param::Chi, Param::Eps];

    pub fn key(self) -> &'static str {
        match self {
            Param::Omega => "omega",
            Param::Splitting => "Omega",
            Param::G1 => "g1",
            Param::G2 => "g2",
            Param::Chi => "chi",
            Param::Eps => "eps",
        }
    }

    pub fn from_key(key: &str) -> Option<Self> {
        Param::ALL.into_iter().find(|p| p.key() == key)
    }

    fn index(self) -> usize {
        Param::ALL.iter().position(|p| *p == self).unwrap()
    }

    /// Unit used when none is given explicitly.
    pub fn default_unit(self) -> Unit {
        match self {
            Param::G1 => Unit::Gs,
            Param::G2 => Unit::Gt,
            Param::Chi => Unit::Abs,
            Param::Omega | Param::Splitting | Param::Eps => Unit::Splitting,
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// Reference scale a parameter value is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Unit {
    /// Absolute energy (or dimensionless for χ).
    Abs,
    /// Multiples of Ω.
    Splitting,
    /// Multiples of g_s = √(ωΩ)/2.
    Gs,
    /// Multiples of g_t = ω/2.
    Gt,
}

impl Unit {
    pub fn key(self) -> &'static str {
        match self {
            Unit::Abs => "abs",
            Unit::Splitting => "Omega",
            Unit::Gs => "gs",
            Unit::Gt => "gt",
        }
    }

    pub fn from_key(key: &str) -> Option<Self> {
        [Unit::Abs, Unit::Splitting, Unit::Gs, Unit::Gt].into_iter().find(|u| u.key() == key)
    }
}

/// Parameter values in user-facing units; resolved into [`ModelParams`] once
/// ω and Ω are known, so scaled units follow a varying frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamPoint {
    values: [f64; 6],
    units: [Unit; 6],
}

impl Default for ParamPoint {
    fn default() -> Self {
        let mut units = [Unit::Abs; 6];
        for p in Param::ALL {
            units[p.index()] = p.default_unit();
        }
        let mut values = [0.0; 6];
        values[Param::Splitting.index()] = 1.0;
        Self { values, units }
    }
}

impl ParamPoint {
    pub fn value(&self, param: Param) -> f64 {
        self.values[param.index()]
    }

    pub fn unit(&self, param: Param) -> Unit {
        self.units[param.index()]
    }

    pub fn set(&mut self, param: Param, value: f64) {
        self.values[param.index()] = value;
    }

    pub fn with(mut self, param: Param, value: f64) -> Self {
        self.set(param, value);
        self
    }

    pub fn set_unit(&mut self, param: Param, unit: Unit) {
        self.units[param.index()] = unit;
    }

    pub fn with_unit(mut self, param: Param, unit: Unit) -> Self {
        self.set_unit(param, unit);
        self
    }

    /// Converts to absolute parameters. ω and Ω may only use `abs` or `Omega`
    /// units (Ω itself only `abs`).
    pub fn resolve(&self) -> Result<ModelParams> {
        let splitting = match self.unit(Param::Splitting) {
            Unit::Abs | Unit::Splitting => self.value(Param::Splitting),
            u => return Err(Error::Validation(format!("Omega cannot be given in unit {}", u.key()))),
        };
        let omega = match self.unit(Param::Omega) {
            Unit::Abs => self.value(Param::Omega),
            Unit::Splitting => self.value(Param::Omega) * splitting,
            u => return Err(Error::Validation(format!("omega cannot be given in unit {}", u.key()))),
        };
        let g_s = (omega * splitting).sqrt() / 2.0;
        let g_t = omega / 2.0;
        let scale = |param: Param| -> f64 {
            match self.unit(param) {
                Unit::Abs => 1.0,
                Unit::Splitting => splitting,
                Unit::Gs => g_s,
                Unit::Gt => g_t,
            }
        };
        Ok(ModelParams {
            omega,
            splitting,
            g1: self.value(Param::G1) * scale(Param::G1),
            g2: self.value(Param::G2) * scale(Param::G2),
            chi: self.value(Param::Chi) * if self.unit(Param::Chi) == Unit::Abs { 1.0 } else { scale(Param::Chi) },
            eps: self.value(Param::Eps) * scale(Param::Eps),
        })
    }
}
