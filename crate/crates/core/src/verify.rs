//! Reference checks against the closed forms and structural properties of
//! the model, grouped into suites for the `verify` command.

use std::fmt::Write as _;

use serde::Serialize;

use crate::boundaries::{boundaries_finite_freq, boundary_low_freq, g1c_iv, g1c_round, g2e_series, SolveFor};
use crate::detection::{
    delta_sigma_z_along, detect_transitions, scan_1d, trace_boundary, transition_spread, Axis, DetectOptions,
    TransitionOrder, TransitionPoint,
};
use crate::eigensolve::{converged_ground, dense_ground, ground_eigenpair, solve_at_truncation, SolverOptions};
use crate::model::{build_hamiltonian, ModelParams, Param, ParamPoint, Unit};
use crate::observables::compute_observables;
use crate::semiclassical::{potentials, saddle_flattening_point, variational_derivatives, variational_energy, x_scale};
use crate::error::Result;

pub const DOME_REL_TOL: f64 = 0.02;
pub const TILTED_REL_TOL: f64 = 0.05;
pub const ARC_REL_TOL: f64 = 0.05;
pub const EXP_LOG10_TOL: f64 = 0.5;
pub const SUCCESSIVE_REL_TOL: f64 = 0.05;
pub const G1C_IV_REL_TOL: f64 = 0.03;
pub const TRICRITICAL_DSZ: f64 = 0.02;
pub const PARITY_TOL: f64 = 1e-6;
pub const SYMMETRY_TOL: f64 = 1e-9;
pub const STARK_POTENTIAL_TOL: f64 = 1e-12;
pub const STARK_ED_TOL: f64 = 1e-3;
pub const DOUBLING_TOL: f64 = 1e-10;
pub const DENSE_TOL: f64 = 1e-10;
pub const FD_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(id: &str, name: &str, passed: bool, detail: String) -> Self {
        Self { id: id.into(), name: name.into(), passed, detail }
    }
}

fn detect(base: &ParamPoint, axis: &Axis, opts: &DetectOptions) -> Result<Vec<TransitionPoint>> {
    let scan = scan_1d(base, axis, &opts.solver)?;
    Ok(detect_transitions(&scan, opts))
}

fn options(workers: usize) -> DetectOptions {
    DetectOptions { workers, ..DetectOptions::default() }
}

fn nearest(found: &[TransitionPoint], target: f64, first_only: bool) -> Option<TransitionPoint> {
    found
        .iter()
        .filter(|t| !first_only || t.order == TransitionOrder::First)
        .min_by(|a, b| (a.location - target).abs().total_cmp(&(b.location - target).abs()))
        .copied()
}

/// Round boundary at `ω = 0.01Ω`, `ε = 0`.
pub fn dome_boundary(workers: usize) -> Check {
    let opts = options(workers);
    let mut ok = true;
    let mut detail = String::new();
    for g2 in [0.2, 0.5, 0.8] {
        let base = ParamPoint::default().with(Param::Omega, 0.01).with(Param::G2, g2);
        let expected = g1c_round(&base.resolve().unwrap()).unwrap() / base.resolve().unwrap().g_s();
        let found = detect(&base, &Axis::linear(Param::G1, 0.3, 1.2, 46), &opts).unwrap_or_default();
        match nearest(&found, expected, true) {
            Some(t) => {
                let rel = (t.location / expected - 1.0).abs();
                ok &= rel <= DOME_REL_TOL;
                let _ = write!(detail, "g2={g2}gt: g1c={:.5}gs vs {:.5} ({:.2}%); ", t.location, expected, 100.0 * rel);
            }
            None => {
                ok = false;
                match nearest(&found, expected, false) {
                    Some(t) => {
                        let _ = write!(detail, "g2={g2}gt: only a {:?} point at {:.5}gs vs {:.5}; ", t.order, t.location, expected);
                    }
                    None => {
                        let _ = write!(detail, "g2={g2}gt: no transition; ");
                    }
                }
            }
        }
    }
    Check::new("1", "dome boundary within 2%", ok, detail)
}

/// Tilted boundary at `ω = 0.01Ω`, `g̃2 = 0.5 g_t`.
pub fn tilted_boundary(workers: usize) -> Check {
    let opts = options(workers);
    let mut ok = true;
    let mut detail = String::new();
    for g1 in [1.1, 1.2, 1.5] {
        let base = ParamPoint::default().with(Param::Omega, 0.01).with(Param::G2, 0.5).with(Param::G1, g1);
        let expected = boundary_low_freq(&base.resolve().unwrap(), SolveFor::Eps).unwrap().value;
        let found = detect(&base, &Axis::linear(Param::Eps, 0.0, 0.6, 61), &opts);
        match found.ok().and_then(|f| nearest(&f, expected, true)) {
            Some(t) => {
                let rel = (t.location / expected - 1.0).abs();
                ok &= rel <= TILTED_REL_TOL;
                let _ = write!(detail, "g1={g1}gs: epsc={:.5} vs {:.5} ({:.2}%); ", t.location, expected, 100.0 * rel);
            }
            None => {
                ok = false;
                let _ = write!(detail, "g1={g1}gs: no first-order transition; ");
            }
        }
    }
    Check::new("2", "tilted boundary within 5%", ok, detail)
}

/// Arc endpoint from the flattening solver against the weak-bias series.
pub fn arc_endpoint() -> Check {
    let mut ok = true;
    let mut detail = String::new();
    for r in [0.002, 0.005, 0.01] {
        let p = ModelParams::new(0.001, 1.0).with_eps(r);
        let series = g2e_series(r, 1.0);
        match saddle_flattening_point(&p) {
            Ok(fp) => {
                let rel = (fp.g2_bar.abs() / series - 1.0).abs();
                ok &= rel <= ARC_REL_TOL;
                let _ = write!(detail, "eps={r}: |g2E|={:.4} vs series {:.4} ({:.1}%); ", fp.g2_bar.abs(), series, 100.0 * rel);
            }
            Err(e) => {
                ok = false;
                let _ = write!(detail, "eps={r}: {e}; ");
            }
        }
    }
    Check::new("3", "arc endpoint within 5%", ok, detail)
}

/// Exponentially small boundary II at `ω = 0.1Ω`, `g2 = 0`.
pub fn exponential_boundary(workers: usize) -> Check {
    let opts = options(workers);
    let mut ok = true;
    let mut detail = String::new();
    for g1 in [1.15, 1.3, 1.5] {
        let base = ParamPoint::default().with(Param::Omega, 0.1).with(Param::G1, g1);
        let expected = boundaries_finite_freq(&base.resolve().unwrap(), SolveFor::Eps).unwrap().ii.value;
        let found = detect(&base, &Axis::log(Param::Eps, 1e-7, 0.3, 76), &opts);
        match found.ok().and_then(|f| f.first().copied()) {
            Some(t) => {
                let dev = (t.location / expected).log10().abs();
                ok &= dev <= EXP_LOG10_TOL;
                let _ = write!(detail, "g1={g1}gs: epsc={:.3e} vs {:.3e} ({:.2} decades); ", t.location, expected, dev);
            }
            None => {
                ok = false;
                let _ = write!(detail, "g1={g1}gs: no transition; ");
            }
        }
    }
    Check::new("4", "boundary II within half a decade", ok, detail)
}

/// Three successive transitions at `ω = 0.1Ω`, `ε = 10⁻³ g_t`, `g2 = 10^-4.5 g_t`.
pub fn successive_transitions(workers: usize) -> Check {
    let opts = options(workers);
    let base = ParamPoint::default()
        .with(Param::Omega, 0.1)
        .with(Param::Eps, 1e-3)
        .with_unit(Param::Eps, Unit::Gt)
        .with(Param::G2, 10f64.powf(-4.5));
    let expected = [1.0, 1.6, 2.5];
    let iv = g1c_iv(&base.resolve().unwrap()).unwrap().value / base.resolve().unwrap().g_s();
    let found = match detect(&base, &Axis::linear(Param::G1, 0.8, 3.0, 111), &opts) {
        Ok(f) => f,
        Err(e) => return Check::new("5", "successive transitions", false, e.to_string()),
    };
    let locs: Vec<f64> = found.iter().map(|t| t.location).collect();
    let mut detail = format!("found {} at {:?}; ", locs.len(), locs.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>());
    let mut ok = locs.len() == 3;
    if ok {
        for (l, e) in locs.iter().zip(expected) {
            let rel = (l / e - 1.0).abs();
            ok &= rel <= SUCCESSIVE_REL_TOL;
            let _ = write!(detail, "{l:.4} vs {e} ({:.1}%); ", 100.0 * rel);
        }
        let rel = (locs[2] / iv - 1.0).abs();
        ok &= rel <= G1C_IV_REL_TOL;
        let _ = write!(detail, "last vs g1c_IV {iv:.4} ({:.2}%)", 100.0 * rel);
    }
    Check::new("5", "three transitions near 1.0, 1.6, 2.5 gs", ok, detail)
}

/// `Δσz` along the `ε = 0` dome toward `g_s`, and the merge of two transitions
/// at `ε = 40 g_t`.
pub fn tricriticality_i(workers: usize) -> Check {
    let opts = options(workers);
    let mut detail = String::new();
    let fixed = ParamPoint::default().with(Param::Omega, 0.001);
    let scan = Axis::linear(Param::G1, 0.5, 1.2, 36);
    let trace = Axis::log(Param::G2, 0.002, 0.5, 9);
    let mut dome_ok = false;
    match trace_boundary(&fixed, &scan, &trace, &opts) {
        Ok(curves) => {
            if let Some(c) = curves.iter().max_by_key(|c| c.points.len()) {
                let along = delta_sigma_z_along(c, &opts);
                let smallest = along.iter().min_by(|a, b| a.0.total_cmp(&b.0)).copied();
                let largest = along.iter().max_by(|a, b| a.0.total_cmp(&b.0)).copied();
                if let (Some(s), Some(l)) = (smallest, largest) {
                    dome_ok = s.1 < TRICRITICAL_DSZ && l.1 > s.1;
                    let _ = write!(detail, "dome dsz: {:.4} at g2={:.3}gt -> {:.4} at g2={:.4}gt; ", l.1, l.0, s.1, s.0);
                }
            }
        }
        Err(e) => {
            let _ = write!(detail, "dome trace failed: {e}; ");
        }
    }
    let counts: Vec<(f64, Vec<TransitionOrder>)> = [0.1, 0.45]
        .into_iter()
        .map(|g2| {
            let base = ParamPoint::default()
                .with(Param::Omega, 0.001)
                .with(Param::Eps, 40.0)
                .with_unit(Param::Eps, Unit::Gt)
                .with(Param::G2, g2);
            let found = detect(&base, &Axis::linear(Param::G1, 0.0, 1.5, 76), &opts).unwrap_or_default();
            (g2, found.iter().map(|t| t.order).collect())
        })
        .collect();
    let merge_ok = counts[0].1 == [TransitionOrder::SecondLike, TransitionOrder::First] && counts[1].1.len() == 1;
    let _ = write!(detail, "eps=40gt: g2=0.1gt {:?}, g2=0.45gt {:?}", counts[0].1, counts[1].1);
    Check::new("6", "tricriticality (i)", dome_ok && merge_ok, detail)
}

/// Parity line: `|⟨σz⟩|` vanishes at `ε = g2 = 0`.
pub fn parity_line() -> Check {
    let mut worst: f64 = 0.0;
    let mut skipped = 0;
    for omega in [0.5, 0.1, 0.01] {
        for g1 in [0.3, 0.9, 1.2, 2.0] {
            let p = ModelParams::new(omega, 1.0);
            let p = p.with_g1(g1 * p.g_s());
            let Ok(sol) = converged_ground(&p, &SolverOptions::default()) else { return Check::new("7a", "parity line", false, "solve failed".into()) };
            match compute_observables(&sol, &p) {
                Ok(o) => worst = worst.max(o.sigma_z.abs()),
                Err(_) => skipped += 1,
            }
        }
    }
    Check::new("7a", "parity line", worst <= PARITY_TOL, format!("max |sz| = {worst:.2e} ({skipped} quasi-degenerate points skipped)"))
}

/// `(ε, g2) → (−ε, −g2)` leaves the energy unchanged and flips `⟨σz⟩`.
pub fn bias_symmetry() -> Check {
    let mut worst: f64 = 0.0;
    for (omega, g1, g2, eps) in [(0.1, 0.8, 0.3, 0.01), (0.01, 1.2, 0.2, 0.003), (0.5, 1.5, -0.4, 0.05)] {
        let p = ModelParams::new(omega, 1.0);
        let p = p.with_g1(g1 * p.g_s()).with_g2(g2 * p.g_t()).with_eps(eps);
        let q = p.with_g2(-p.g2).with_eps(-p.eps);
        let opts = SolverOptions::default();
        let (Ok(a), Ok(b)) = (converged_ground(&p, &opts), converged_ground(&q, &opts)) else {
            return Check::new("7b", "bias symmetry", false, "solve failed".into());
        };
        let (Ok(oa), Ok(ob)) = (compute_observables(&a, &p), compute_observables(&b, &q)) else {
            return Check::new("7b", "bias symmetry", false, "quasi-degenerate".into());
        };
        let scale = omega.max(a.energy.abs());
        worst = worst.max((a.energy - b.energy).abs() / scale).max((oa.sigma_z + ob.sigma_z).abs());
    }
    Check::new("7b", "(eps, g2) -> (-eps, -g2) symmetry", worst <= SYMMETRY_TOL, format!("max deviation {worst:.2e}"))
}

/// Stark scaling: `(g2, χ = 1)` and `(2 g2, χ = 0)` share `g̃2`.
pub fn stark_scaling() -> Check {
    let p = ModelParams::new(0.001, 1.0);
    let a = p.with_g1(0.8 * p.g_s()).with_g2(0.2 * p.g_t()).with_chi(1.0).with_eps(0.002);
    let b = a.with_g2(0.4 * p.g_t()).with_chi(0.0);
    let xs = x_scale(&a);
    let mut pot: f64 = 0.0;
    for k in -40..=40 {
        let x = xs * k as f64 / 20.0;
        let (pa, pb) = (potentials(&a, x).unwrap(), potentials(&b, x).unwrap());
        let (ea, eb) = (variational_energy(&a, x).unwrap(), variational_energy(&b, x).unwrap());
        pot = pot.max((pa.0 - pb.0).abs()).max((pa.1 - pb.1).abs()).max((ea - eb).abs());
    }
    let opts = SolverOptions::default();
    let ed = match (converged_ground(&a, &opts), converged_ground(&b, &opts)) {
        (Ok(sa), Ok(sb)) => match (compute_observables(&sa, &a), compute_observables(&sb, &b)) {
            (Ok(oa), Ok(ob)) => (oa.sigma_z - ob.sigma_z).abs().max((oa.sigma_x - ob.sigma_x).abs()),
            _ => f64::NAN,
        },
        _ => f64::NAN,
    };
    Check::new(
        "7c",
        "Stark scaling",
        pot <= STARK_POTENTIAL_TOL && ed <= STARK_ED_TOL,
        format!("potentials {pot:.2e}, ED observables {ed:.2e}"),
    )
}

/// Energy drift when the accepted truncation is doubled.
pub fn truncation_doubling() -> Check {
    let mut worst: f64 = 0.0;
    for (omega, g1, g2, eps) in [(0.1, 1.2, 0.0, 1e-3), (0.01, 0.9, 0.5, 0.0), (0.001, 1.1, 0.1, 0.02)] {
        let p = ModelParams::new(omega, 1.0);
        let p = p.with_g1(g1 * p.g_s()).with_g2(g2 * p.g_t()).with_eps(eps);
        let opts = SolverOptions::default();
        let Ok(sol) = converged_ground(&p, &opts) else { return Check::new("7d", "truncation doubling", false, "solve failed".into()) };
        let Ok(again) = solve_at_truncation(&p, 2 * sol.truncation_used, &opts, None) else {
            return Check::new("7d", "truncation doubling", false, "doubled solve failed".into());
        };
        worst = worst.max((again.energy - sol.energy).abs() / omega.max(sol.energy.abs()));
    }
    Check::new("7d", "truncation doubling drift", worst <= DOUBLING_TOL, format!("max relative drift {worst:.2e}"))
}

/// Iterative and dense solvers agree below dimension 1024.
pub fn dense_oracle() -> Check {
    let mut worst: f64 = 0.0;
    for (omega, g1, g2, chi, eps, n) in [(0.1, 1.3, 0.2, 0.0, 1e-3, 300), (0.05, 0.9, -0.3, 0.5, 0.01, 500), (0.5, 2.0, 0.0, 0.0, 0.0, 200)] {
        let p = ModelParams::new(omega, 1.0);
        let p = p.with_g1(g1 * p.g_s()).with_g2(g2 * p.g_t()).with_chi(chi).with_eps(eps);
        let h = build_hamiltonian(&p, n).unwrap();
        let dense = dense_ground(&h);
        let opts = SolverOptions { dense_max_dim: 0, ..SolverOptions::default() };
        let Ok(it) = ground_eigenpair(&h, 1e-10 * omega.max(dense.energy.abs()), &opts) else {
            return Check::new("7e", "dense oracle", false, "iterative solve failed".into());
        };
        worst = worst.max((it.energy - dense.energy).abs() / omega.max(dense.energy.abs()));
    }
    Check::new("7e", "iterative vs dense", worst <= DENSE_TOL, format!("max relative difference {worst:.2e}"))
}

/// Central differences of the variational energy against its derivative.
pub fn finite_difference() -> Check {
    let mut worst: f64 = 0.0;
    for (omega, g1, g2, eps) in [(0.01, 1.3, 0.4, 0.01), (0.001, 0.9, -0.6, 0.005), (0.1, 2.0, 0.1, 0.0)] {
        let p = ModelParams::new(omega, 1.0);
        let p = p.with_g1(g1 * p.g_s()).with_g2(g2 * p.g_t()).with_eps(eps);
        let xs = x_scale(&p);
        for k in -10..=10 {
            let x = xs * k as f64 / 7.0;
            let h = 1e-5 * xs;
            let fd = (variational_energy(&p, x + h).unwrap() - variational_energy(&p, x - h).unwrap()) / (2.0 * h);
            let d = variational_derivatives(&p, x).unwrap()[1];
            let scale = omega.max(d.abs() * xs) / xs;
            worst = worst.max((fd - d).abs() / scale);
        }
    }
    Check::new("7f", "finite-difference derivative", worst <= FD_TOL, format!("max relative error {worst:.2e}"))
}

pub fn property_suite() -> Vec<Check> {
    vec![parity_line(), bias_symmetry(), stark_scaling(), truncation_doubling(), dense_oracle(), finite_difference()]
}

/// Distance of the finite-frequency boundaries from `g_s` shrinks as `ω`
/// decreases.
pub fn quadruple_convergence(workers: usize) -> Check {
    let opts = options(workers);
    let mut spreads = Vec::new();
    let mut detail = String::new();
    for omega in [0.2, 0.1, 0.05] {
        let base = ParamPoint::default()
            .with(Param::Omega, omega)
            .with(Param::Eps, 5e-4)
            .with_unit(Param::Eps, Unit::Gt)
            .with(Param::G2, 10f64.powf(-4.5));
        let found = detect(&base, &Axis::linear(Param::G1, 0.8, 3.2, 121), &opts).unwrap_or_default();
        let spread = transition_spread(&found, 1.0);
        let _ = write!(
            detail,
            "omega={omega}: {} transitions, spread {} around gs; ",
            found.len(),
            spread.map_or("-".into(), |s| format!("{s:.4}gs"))
        );
        spreads.push((found.len(), spread.unwrap_or(f64::NAN)));
    }
    let ok = spreads.iter().all(|s| s.0 >= 1) && spreads.windows(2).all(|w| w[1].1 < w[0].1);
    Check::new("8", "quadruple convergence", ok, detail)
}

/// Checks selected by a `verify --suite` name.
pub fn run_suite(name: &str, workers: usize) -> Option<Vec<Check>> {
    match name {
        "parity" => Some(vec![parity_line(), bias_symmetry()]),
        "stark" => Some(vec![stark_scaling()]),
        "boundaries" => Some(vec![dome_boundary(workers), tilted_boundary(workers), arc_endpoint(), exponential_boundary(workers)]),
        "tricritical" => Some(vec![successive_transitions(workers), tricriticality_i(workers), quadruple_convergence(workers)]),
        _ => None,
    }
}

pub const SUITES: [&str; 4] = ["parity", "stark", "boundaries", "tricritical"];
