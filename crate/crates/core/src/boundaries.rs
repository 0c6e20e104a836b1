//! Closed-form phase boundaries and the polaron quantities behind them.
//!
//! Every function returns plain values together with the domain it is meant
//! for; nothing is clamped.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{validate_params, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    Round,
    TiltedG1c,
    TiltedEpsc,
    I,
    II,
    III,
    IV,
    G2eSeries,
    Ratio,
    G1cIv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryValue {
    pub kind: BoundaryKind,
    pub value: f64,
    pub validity: String,
}

impl BoundaryValue {
    fn new(kind: BoundaryKind, value: f64, validity: impl Into<String>) -> Self {
        Self { kind, value, validity: validity.into() }
    }
}

/// `ḡ2 = g̃2 / g_t`.
pub fn g2_bar(p: &ModelParams) -> f64 {
    p.g2_tilde() / p.g_t()
}

/// `ḡ1 = g1 / g_s`.
pub fn g1_bar(p: &ModelParams) -> f64 {
    p.g1 / p.g_s()
}

/// Round boundary at zero bias, `g_s √(1 − ḡ2²)`.
pub fn g1c_round(p: &ModelParams) -> Result<f64> {
    validate_params(p)?;
    let gb = g2_bar(p);
    Ok(p.g_s() * (1.0 - gb * gb).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveFor {
    G1,
    Eps,
    G2,
}

/// Low-frequency tilted boundary, solved for `g1` (`|g1c|`) or for the bias.
pub fn boundary_low_freq(p: &ModelParams, solve_for: SolveFor) -> Result<BoundaryValue> {
    validate_params(p)?;
    let gb = g2_bar(p);
    let root = (1.0 - gb * gb).sqrt();
    let opposite = gb * p.eps < 0.0;
    let validity = if opposite {
        let e = g2e_series(p.eps.abs(), p.splitting);
        format!("g2*eps < 0: arc boundary, terminated at |g2| = g2E ~ {e:.4} g_t (series)")
    } else {
        "g2*eps >= 0: unbounded branch; low-frequency limit".to_string()
    };
    match solve_for {
        SolveFor::G1 => {
            if gb == 0.0 {
                return Err(Error::DivisionByZeroG2);
            }
            let value = p.g_s() * (1.0 + p.eps / (gb * p.splitting)) * root;
            Ok(BoundaryValue::new(BoundaryKind::TiltedG1c, value, validity))
        }
        SolveFor::Eps => {
            let value = gb * (g1_bar(p).abs() / root - 1.0) * p.splitting;
            Ok(BoundaryValue::new(BoundaryKind::TiltedEpsc, value, validity))
        }
        SolveFor::G2 => Err(Error::DomainError("the low-frequency boundary is given for g1 or eps".into())),
    }
}

/// Weak-bias series for the arc endpoint, in units of `g_t`.
pub fn g2e_series(eps: f64, splitting: f64) -> f64 {
    let r = eps / splitting;
    let u = r / 5.0;
    3.0 * u.cbrt() + 226.0 * r / 75.0 - 362011.0 / 27000.0 * u.powf(5.0 / 3.0)
}

/// Displaced-packet quantities above `g_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolaronParameters {
    pub zeta: f64,
    pub t: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Left-right overlap `exp[−ζ² ḡ1² Ω / (2ω)]`.
    pub overlap: f64,
    pub delta_c: f64,
    pub g1_bar: f64,
    pub g2_bar: f64,
}

pub fn polaron_params(p: &ModelParams) -> Result<PolaronParameters> {
    validate_params(p)?;
    let g1b = g1_bar(p).abs();
    if g1b < 1.0 {
        return Err(Error::DomainError(format!("polaron quantities need g1 >= g_s (g1 = {g1b} g_s)")));
    }
    let zeta = (1.0 - g1b.powi(-4)).sqrt();
    Ok(PolaronParameters {
        zeta,
        t: (1.0 - zeta).powi(2) / 2.0 + p.omega / (g1b * g1b * p.splitting),
        alpha: ((1.0 + zeta) / 2.0).sqrt(),
        beta: ((1.0 - zeta) / 2.0).sqrt(),
        overlap: (-zeta * zeta * g1b * g1b * p.splitting / (2.0 * p.omega)).exp(),
        delta_c: (-1.0f64).exp(),
        g1_bar: g1b,
        g2_bar: g2_bar(p),
    })
}

/// Boundaries II, III and IV at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteFreqBoundaries {
    pub ii: BoundaryValue,
    pub iii: BoundaryValue,
    pub iv: BoundaryValue,
}

/// Leading-order finite-frequency boundaries. For `SolveFor::Eps` the values
/// are critical biases at the point's `g̃2`; for `SolveFor::G2` they are
/// critical `g̃2` (Stark factor included) at the point's bias.
pub fn boundaries_finite_freq(p: &ModelParams, solve_for: SolveFor) -> Result<FiniteFreqBoundaries> {
    let pp = polaron_params(p)?;
    let z = pp.zeta;
    let g1sq = pp.g1_bar * pp.g1_bar;
    let validity = "g1 > g_s, weak eps and g2 (leading order)";
    let (split, center) = match solve_for {
        SolveFor::Eps => (
            (1.0 - pp.t) * p.splitting / (4.0 * pp.delta_c * z) * pp.overlap,
            0.25 * z * z * g1sq * pp.g2_bar * p.splitting,
        ),
        SolveFor::G2 => (
            (1.0 - pp.t) * p.g_t() / (pp.delta_c * z.powi(3) * g1sq) * pp.overlap,
            4.0 * p.eps / (z * z * g1sq * p.splitting) * p.g_t(),
        ),
        SolveFor::G1 => return Err(Error::DomainError("finite-frequency boundaries are given for eps or g2".into())),
    };
    Ok(FiniteFreqBoundaries {
        ii: BoundaryValue::new(BoundaryKind::II, center + split, validity),
        iii: BoundaryValue::new(BoundaryKind::III, center - split, validity),
        iv: BoundaryValue::new(BoundaryKind::IV, center, validity),
    })
}

/// Linear coupling where boundary IV meets the fixed bias and `ḡ2 > 0`.
pub fn g1c_iv(p: &ModelParams) -> Result<BoundaryValue> {
    validate_params(p)?;
    let gb = g2_bar(p);
    if !(gb > 0.0) {
        return Err(Error::DomainError("g1c^IV needs g2 > 0".into()));
    }
    let e = p.eps;
    let o = p.splitting;
    let value = p.g_s() * ((2.0 * e + (4.0 * e * e + gb * gb * o * o).sqrt()) / (o * gb)).sqrt();
    Ok(BoundaryValue::new(BoundaryKind::G1cIv, value, "g2 > 0; location where II/III collapse onto IV"))
}

/// Finite-frequency shift of the first transition, `√(ω² + √(ω⁴ + g_s⁴))`.
pub fn g1c_i(p: &ModelParams) -> Result<BoundaryValue> {
    validate_params(p)?;
    let w = p.omega;
    let gs = p.g_s();
    let value = (w * w + (w.powi(4) + gs.powi(4)).sqrt()).sqrt();
    Ok(BoundaryValue::new(BoundaryKind::I, value, "weak eps and g2"))
}

/// Ratio of critical bias to critical `g̃2` on boundary II, `ζ² ḡ1² Ω / (4 g_t)`.
pub fn sensitivity_ratio(p: &ModelParams) -> Result<BoundaryValue> {
    let pp = polaron_params(p)?;
    let value = pp.zeta * pp.zeta * pp.g1_bar * pp.g1_bar * p.splitting / (4.0 * p.g_t());
    Ok(BoundaryValue::new(BoundaryKind::Ratio, value, "g1 > g_s"))
}

/// Leading-order energy difference of the pure left and right states.
pub fn left_right_energy_difference(p: &ModelParams) -> Result<f64> {
    let pp = polaron_params(p)?;
    let z = pp.zeta;
    let denom = (z * z + pp.g1_bar.powi(-4)).sqrt();
    Ok(pp.g2_bar * pp.g1_bar * pp.g1_bar * z * z * ((1.0 + z / 2.0) / denom - 1.0) * p.splitting
        - 2.0 * z * p.eps / denom)
}
