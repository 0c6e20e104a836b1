//! Order parameters and position-space profiles of a ground state.

use serde::{Deserialize, Serialize};

use crate::eigensolve::GroundSolution;
use crate::error::{Error, Result};
use crate::model::{validate_params, ModelParams};

/// Spin weights below this count as depleted.
pub const DEPLETION_THRESHOLD: f64 = 1e-10;

/// Highest Fock level the profile evaluator accepts.
pub const MAX_PROFILE_LEVEL: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservableSet {
    pub sigma_z: f64,
    pub sigma_x: f64,
    /// `⟨a† + a⟩ / √2`
    pub x_mean: f64,
    /// Spin-filtered displacements (not normalized by the spin weights).
    pub x_plus: f64,
    pub x_minus: f64,
    pub rho_plus: f64,
    pub rho_minus: f64,
    /// `x± / (ρ± |x0|)`.
    pub x_tilde_plus: f64,
    pub x_tilde_minus: f64,
    pub parity: f64,
    /// Set when a spin weight fell below [`DEPLETION_THRESHOLD`] and its `x̃` was zeroed.
    pub depleted: bool,
}

/// Displacement `|x0|` used to normalize `x̃±`: the spin sector `sign(−g̃2)`,
/// i.e. `|g1′/(1 − |g̃2′|)|`.
pub fn normalizing_displacement(p: &ModelParams) -> Result<f64> {
    let d = validate_params(p)?;
    Ok((d.g1_prime / (1.0 - d.g2_tilde_prime.abs())).abs())
}

/// Observables of a ground state; refuses quasi-degenerate solutions.
pub fn compute_observables(sol: &GroundSolution, p: &ModelParams) -> Result<ObservableSet> {
    if sol.quasi_degenerate {
        return Err(Error::DegenerateAmbiguity { gap: sol.gap.unwrap_or(0.0) });
    }
    observables_of(&sol.coeffs, p)
}

/// Observables of an arbitrary normalized coefficient vector.
pub fn observables_of(coeffs: &[f64], p: &ModelParams) -> Result<ObservableSet> {
    let x0 = normalizing_displacement(p)?;
    let levels = coeffs.len() / 2;
    let (mut rho_plus, mut rho_minus, mut sigma_x, mut parity) = (0.0, 0.0, 0.0, 0.0);
    let (mut x_plus, mut x_minus) = (0.0, 0.0);
    for n in 0..levels {
        let up = coeffs[2 * n];
        let down = coeffs[2 * n + 1];
        rho_plus += up * up;
        rho_minus += down * down;
        sigma_x += 2.0 * up * down;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        parity += sign * 2.0 * up * down;
        if n + 1 < levels {
            let s = ((n + 1) as f64).sqrt();
            x_plus += 2.0 * up * coeffs[2 * n + 2] * s;
            x_minus += 2.0 * down * coeffs[2 * n + 3] * s;
        }
    }
    let norm = rho_plus + rho_minus;
    rho_plus /= norm;
    rho_minus /= norm;
    sigma_x /= norm;
    parity /= norm;
    x_plus /= norm * std::f64::consts::SQRT_2;
    x_minus /= norm * std::f64::consts::SQRT_2;

    let mut depleted = false;
    let mut tilde = |x: f64, rho: f64| {
        if rho < DEPLETION_THRESHOLD {
            depleted = true;
            0.0
        } else if x0 == 0.0 {
            0.0
        } else {
            x / (rho * x0)
        }
    };
    let x_tilde_plus = tilde(x_plus, rho_plus);
    let x_tilde_minus = tilde(x_minus, rho_minus);
    Ok(ObservableSet {
        sigma_z: rho_plus - rho_minus,
        sigma_x,
        x_mean: x_plus + x_minus,
        x_plus,
        x_minus,
        rho_plus,
        rho_minus,
        x_tilde_plus,
        x_tilde_minus,
        parity,
        depleted,
    })
}

/// Spin components of the ground state in position space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveProfile {
    pub grid: Vec<f64>,
    pub psi_plus: Vec<f64>,
    pub psi_minus: Vec<f64>,
}

impl WaveProfile {
    /// Trapezoid estimate of `∫ (Ψ+² + Ψ−²) dx`.
    pub fn norm(&self) -> f64 {
        let f: Vec<f64> = self.psi_plus.iter().zip(&self.psi_minus).map(|(a, b)| a * a + b * b).collect();
        self.grid
            .windows(2)
            .zip(f.windows(2))
            .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
            .sum()
    }
}

/// `x_c = √2 g_s / ω`.
pub fn profile_scale(p: &ModelParams) -> f64 {
    std::f64::consts::SQRT_2 * p.g_s() / p.omega
}

/// Default plotting window `[−1.5 x_c, 1.5 x_c]`.
pub fn default_profile_range(p: &ModelParams) -> (f64, f64) {
    let xc = profile_scale(p);
    (-1.5 * xc, 1.5 * xc)
}

/// `Ψ±(x) = Σ c_{n,±} φ_n(x)` on `points` equally spaced nodes of `[xmin, xmax]`.
///
/// The Hermite functions run through the normalized three-term recurrence with
/// a separately tracked log scale, so high levels neither overflow nor
/// underflow to NaN.
pub fn wavefunction_profile(sol: &GroundSolution, xmin: f64, xmax: f64, points: usize) -> Result<WaveProfile> {
    profile_from_coeffs(&sol.coeffs, xmin, xmax, points)
}

pub fn profile_from_coeffs(coeffs: &[f64], xmin: f64, xmax: f64, points: usize) -> Result<WaveProfile> {
    let levels = coeffs.len() / 2;
    if levels > MAX_PROFILE_LEVEL {
        return Err(Error::OverflowGuard { level: levels - 1, reason: "above the supported profile level" });
    }
    if points < 2 || !(xmax > xmin) {
        return Err(Error::Validation("profile needs at least two points on a non-empty range".into()));
    }
    let step = (xmax - xmin) / (points - 1) as f64;
    let mut grid = Vec::with_capacity(points);
    let mut psi_plus = Vec::with_capacity(points);
    let mut psi_minus = Vec::with_capacity(points);
    for i in 0..points {
        let x = if i + 1 == points { xmax } else { xmin + step * i as f64 };
        let (up, down) = hermite_sum(coeffs, levels, x)?;
        grid.push(x);
        psi_plus.push(up);
        psi_minus.push(down);
    }
    Ok(WaveProfile { grid, psi_plus, psi_minus })
}

fn hermite_sum(coeffs: &[f64], levels: usize, x: f64) -> Result<(f64, f64)> {
    const BIG: f64 = 1e150;
    let ln_big = BIG.ln();
    // φ_n = a_n · exp(log_scale)
    let mut log_scale = -0.5 * x * x - 0.25 * std::f64::consts::PI.ln();
    let mut prev = 0.0;
    let mut cur = 1.0;
    let (mut up, mut down) = (0.0, 0.0);
    for n in 0..levels {
        let factor = log_scale.exp();
        up += coeffs[2 * n] * cur * factor;
        down += coeffs[2 * n + 1] * cur * factor;
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * cur - (nf / (nf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > BIG {
            cur /= BIG;
            prev /= BIG;
            log_scale += ln_big;
        }
        if !cur.is_finite() || !log_scale.is_finite() {
            return Err(Error::OverflowGuard { level: n + 1, reason: "non-finite Hermite recurrence value" });
        }
    }
    Ok((up, down))
}
