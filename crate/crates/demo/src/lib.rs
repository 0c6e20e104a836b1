//! Browser bindings: semiclassical landscape, exact ground state and the
//! closed-form boundaries at one parameter point. Every export returns JSON.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use rabi_core::boundaries::{
    boundaries_finite_freq, boundary_low_freq, g1c_i, g1c_iv, g1c_round, BoundaryValue, SolveFor,
};
use rabi_core::eigensolve::{converged_ground, SolverOptions};
use rabi_core::observables::{compute_observables, wavefunction_profile, ObservableSet};
use rabi_core::semiclassical::{default_range, landscape, potentials, StationaryPoint};
use rabi_core::ModelParams;

/// Couplings in scaled units: `g1` in `g_s`, `g2` in `g_t`, bias and
/// frequency in units of `Ω`.
fn model(omega: f64, g1: f64, g2: f64, chi: f64, eps: f64) -> ModelParams {
    let p = ModelParams::new(omega, 1.0);
    p.with_g1(g1 * p.g_s()).with_g2(g2 * p.g_t()).with_chi(chi).with_eps(eps)
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Landscape {
    x: Vec<f64>,
    energy: Vec<f64>,
    v_plus: Vec<f64>,
    v_minus: Vec<f64>,
    stationary: Vec<StationaryPoint>,
}

pub fn landscape_json(omega: f64, g1: f64, g2: f64, chi: f64, eps: f64, points: usize) -> Result<String, String> {
    let p = model(omega, g1, g2, chi, eps);
    let (lo, hi) = default_range(&p).map_err(|e| e.to_string())?;
    let l = landscape(&p, lo, hi, points.max(3)).map_err(|e| e.to_string())?;
    let mut out = Landscape { x: vec![], energy: vec![], v_plus: vec![], v_minus: vec![], stationary: l.stationary_points };
    for &(x, e) in &l.samples {
        let (vp, vm) = potentials(&p, x).map_err(|e| e.to_string())?;
        out.x.push(x);
        out.energy.push(e);
        out.v_plus.push(vp);
        out.v_minus.push(vm);
    }
    to_json(&out)
}

#[derive(Serialize)]
struct Ground {
    energy: f64,
    truncation: usize,
    quasi_degenerate: bool,
    observables: Option<ObservableSet>,
    x: Vec<f64>,
    psi_plus: Vec<f64>,
    psi_minus: Vec<f64>,
}

pub fn ground_json(omega: f64, g1: f64, g2: f64, chi: f64, eps: f64, points: usize) -> Result<String, String> {
    let p = model(omega, g1, g2, chi, eps);
    let sol = converged_ground(&p, &SolverOptions::default()).map_err(|e| e.to_string())?;
    let (lo, hi) = default_range(&p).map_err(|e| e.to_string())?;
    let prof = wavefunction_profile(&sol, lo, hi, points.max(2)).map_err(|e| e.to_string())?;
    to_json(&Ground {
        energy: sol.energy,
        truncation: sol.truncation_used,
        quasi_degenerate: sol.quasi_degenerate,
        observables: compute_observables(&sol, &p).ok(),
        x: prof.grid,
        psi_plus: prof.psi_plus,
        psi_minus: prof.psi_minus,
    })
}

#[derive(Serialize)]
struct Boundaries {
    /// Critical `g1` in units of `g_s`.
    g1: Vec<BoundaryValue>,
    /// Critical bias in units of `Ω`.
    eps: Vec<BoundaryValue>,
    /// Critical `g̃2` in units of `g_t`.
    g2: Vec<BoundaryValue>,
}

pub fn boundaries_json(omega: f64, g1: f64, g2: f64, chi: f64, eps: f64) -> Result<String, String> {
    let p = model(omega, g1, g2, chi, eps);
    let scaled = |mut b: BoundaryValue, s: f64| {
        b.value /= s;
        b
    };
    let mut out = Boundaries { g1: vec![], eps: vec![], g2: vec![] };
    if eps == 0.0 {
        if let Ok(v) = g1c_round(&p) {
            out.g1.push(scaled(
                BoundaryValue { kind: rabi_core::boundaries::BoundaryKind::Round, value: v, validity: "eps = 0".into() },
                p.g_s(),
            ));
        }
    } else if let Ok(b) = boundary_low_freq(&p, SolveFor::G1) {
        out.g1.push(scaled(b, p.g_s()));
    }
    for b in [g1c_i(&p), g1c_iv(&p)].into_iter().flatten() {
        out.g1.push(scaled(b, p.g_s()));
    }
    if let Ok(b) = boundary_low_freq(&p, SolveFor::Eps) {
        out.eps.push(b);
    }
    if let Ok(b) = boundaries_finite_freq(&p, SolveFor::Eps) {
        out.eps.extend([b.ii, b.iii, b.iv]);
    }
    if let Ok(b) = boundaries_finite_freq(&p, SolveFor::G2) {
        out.g2.extend([b.ii, b.iii, b.iv].map(|v| scaled(v, p.g_t())));
    }
    to_json(&out)
}

#[wasm_bindgen]
pub fn landscape_at(omega: f64, g1: f64, g2: f64, chi: f64, eps: f64, points: usize) -> Result<String, JsValue> {
    landscape_json(omega, g1, g2, chi, eps, points).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn ground_state(omega: f64, g1: f64, g2: f64, chi: f64, eps: f64, points: usize) -> Result<String, JsValue> {
    ground_json(omega, g1, g2, chi, eps, points).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn analytic_boundaries(omega: f64, g1: f64, g2: f64, chi: f64, eps: f64) -> Result<String, JsValue> {
    boundaries_json(omega, g1, g2, chi, eps).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn landscape_has_two_minima_above_gs() {
        let v: serde_json::Value = serde_json::from_str(&landscape_json(0.01, 1.5, 0.0, 0.0, 0.0, 401).unwrap()).unwrap();
        assert_eq!(v["x"].as_array().unwrap().len(), 401);
        let minima = v["stationary"].as_array().unwrap().iter().filter(|s| s["kind"] == "minimum").count();
        assert_eq!(minima, 2);
    }

    #[test]
    fn ground_state_of_biased_two_level_system() {
        let v: serde_json::Value = serde_json::from_str(&ground_json(0.1, 0.0, 0.0, 0.0, 0.3, 101).unwrap()).unwrap();
        assert!((v["energy"].as_f64().unwrap() + 0.3f64.hypot(0.5)).abs() < 1e-9);
        assert!((v["observables"]["sigma_z"].as_f64().unwrap() - 0.5145).abs() < 1e-4);
        assert_eq!(v["psi_plus"].as_array().unwrap().len(), 101);
    }

    #[test]
    fn boundaries_in_scaled_units() {
        let v: serde_json::Value = serde_json::from_str(&boundaries_json(0.01, 1.2, 0.6, 0.0, 0.0).unwrap()).unwrap();
        let round = v["g1"].as_array().unwrap().iter().find(|b| b["kind"] == "round").unwrap();
        assert!((round["value"].as_f64().unwrap() - 0.8).abs() < 1e-12);
        assert_eq!(v["eps"].as_array().unwrap().len(), 4);
    }

    #[test]
    fn invalid_parameters_are_reported() {
        assert!(ground_json(0.1, 1.0, 1.5, 0.0, 0.0, 10).is_err());
    }
}
