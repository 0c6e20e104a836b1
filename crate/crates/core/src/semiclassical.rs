//! Low-frequency variational picture: spin-dependent harmonic potentials, the
//! lower branch of their 2×2 mixing, stationary points and degeneracy loci.
//!
//! Positions are in the dimensionless oscillator coordinate `x = (a + a†)/√2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{validate_params, ModelParams, Param};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialComponents {
    pub m_plus: f64,
    pub m_minus: f64,
    pub varpi_plus: f64,
    pub varpi_minus: f64,
    pub x0_plus: f64,
    pub x0_minus: f64,
    pub b_plus: f64,
    pub b_minus: f64,
    pub b0: f64,
    pub e0: f64,
}

/// Constant of the eigenproblem, `−ω/2`.
pub fn e0(p: &ModelParams) -> f64 {
    -p.omega / 2.0
}

/// Reference energy used for plotted landscapes, `−(ω + Ω)/2`.
pub fn plot_offset(p: &ModelParams) -> f64 {
    -(p.omega + p.splitting) / 2.0
}

pub fn potential_components(p: &ModelParams) -> Result<PotentialComponents> {
    let d = validate_params(p)?;
    let g2p = d.g2_prime;
    let chi_g2p = p.chi * g2p;
    let g = d.g2_tilde_prime;
    let g1p = d.g1_prime;
    Ok(PotentialComponents {
        m_plus: 1.0 / (1.0 - g2p + chi_g2p),
        m_minus: 1.0 / (1.0 + g2p - chi_g2p),
        varpi_plus: ((1.0 + chi_g2p).powi(2) - g2p * g2p).sqrt(),
        varpi_minus: ((1.0 - chi_g2p).powi(2) - g2p * g2p).sqrt(),
        x0_plus: -g1p / (1.0 + g),
        x0_minus: g1p / (1.0 - g),
        b_plus: g * g1p * g1p / (2.0 * (1.0 - g * g)),
        b_minus: -g * g1p * g1p / (2.0 * (1.0 - g * g)),
        b0: -g1p * g1p / (2.0 * (1.0 - g * g)),
        e0: e0(p),
    })
}

/// Dimensionless potentials `(v+, v−)` at `x`, bias included as `∓ε/ω`.
/// The curvature enters only through `m±ϖ±² = 1 ± g̃2′`.
pub fn potentials(p: &ModelParams, x: f64) -> Result<(f64, f64)> {
    let c = potential_components(p)?;
    let g = validate_params(p)?.g2_tilde_prime;
    let v_plus = 0.5 * (1.0 + g) * (x - c.x0_plus).powi(2) + c.b_plus + c.b0 - p.eps / p.omega;
    let v_minus = 0.5 * (1.0 - g) * (x - c.x0_minus).powi(2) + c.b_minus + c.b0 + p.eps / p.omega;
    Ok((v_plus, v_minus))
}

/// Precomputed polynomial form of the 2×2 problem:
/// `ε± = ω v± + e0`, `D = ε+ − ε−`, `S = ε+ + ε−`.
#[derive(Debug, Clone, Copy)]
struct Mixing {
    omega: f64,
    splitting: f64,
    eps: f64,
    g: f64,
    g1p: f64,
}

impl Mixing {
    fn new(p: &ModelParams) -> Result<Self> {
        let d = validate_params(p)?;
        Ok(Self { omega: p.omega, splitting: p.splitting, eps: p.eps, g: d.g2_tilde_prime, g1p: d.g1_prime })
    }

    /// `[ε, ε′, ε″, ε‴]` at `x`.
    fn eval(&self, x: f64) -> [f64; 4] {
        let w = self.omega;
        let s = w * x * x - w;
        let s1 = 2.0 * w * x;
        let s2 = 2.0 * w;
        let d = w * (self.g * x * x + 2.0 * self.g1p * x) - 2.0 * self.eps;
        let d1 = 2.0 * w * (self.g * x + self.g1p);
        let d2 = 2.0 * w * self.g;
        let r = (d * d + self.splitting * self.splitting).sqrt();
        let r3 = r * r * r;
        let r5 = r3 * r * r;
        let dd1 = d * d1;
        let r_1 = dd1 / r;
        let r_2 = (d1 * d1 + d * d2) / r - dd1 * dd1 / r3;
        let r_3 = 3.0 * d1 * d2 / r - 3.0 * dd1 * (d1 * d1 + d * d2) / r3 + 3.0 * dd1 * dd1 * dd1 / r5;
        [0.5 * (s - r), 0.5 * (s1 - r_1), 0.5 * (s2 - r_2), -0.5 * r_3]
    }
}

/// Lower variational energy `ε(x)`.
pub fn variational_energy(p: &ModelParams, x: f64) -> Result<f64> {
    Ok(Mixing::new(p)?.eval(x)[0])
}

/// `[ε, ∂ε/∂x, ∂²ε/∂x², ∂³ε/∂x³]` at `x`.
pub fn variational_derivatives(p: &ModelParams, x: f64) -> Result<[f64; 4]> {
    Ok(Mixing::new(p)?.eval(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StationaryKind {
    Minimum,
    Saddle,
    Inflection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryPoint {
    pub x: f64,
    pub energy: f64,
    pub slope: f64,
    pub curvature: f64,
    pub kind: StationaryKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemiclassicalLandscape {
    pub samples: Vec<(f64, f64)>,
    pub stationary_points: Vec<StationaryPoint>,
    /// `(x_L, x_S, x_R)` when there are exactly three stationary points.
    pub labels: Option<(f64, f64, f64)>,
}

impl SemiclassicalLandscape {
    pub fn minima(&self) -> impl Iterator<Item = &StationaryPoint> {
        self.stationary_points.iter().filter(|s| s.kind == StationaryKind::Minimum)
    }

    /// Lowest minimum.
    pub fn global_minimum(&self) -> Option<&StationaryPoint> {
        self.minima().min_by(|a, b| a.energy.total_cmp(&b.energy))
    }

    pub fn has_barrier(&self) -> bool {
        self.stationary_points.iter().any(|s| s.kind == StationaryKind::Saddle)
    }
}

/// Tolerances for [`landscape_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandscapeOptions {
    /// Curvature below `curvature_tol · ω` classifies as an inflection.
    pub curvature_tol: f64,
    /// A non-crossing extremum of `∂ε/∂x` within `shoulder_tol · ω · x_c` of
    /// zero is reported as an inflection (shoulder).
    pub shoulder_tol: f64,
}

impl Default for LandscapeOptions {
    fn default() -> Self {
        Self { curvature_tol: 1e-8, shoulder_tol: 0.02 }
    }
}

/// `x_c = √2 g_s / ω`.
pub fn x_scale(p: &ModelParams) -> f64 {
    std::f64::consts::SQRT_2 * p.g_s() / p.omega
}

/// A window containing both displacements with margin.
pub fn default_range(p: &ModelParams) -> Result<(f64, f64)> {
    let c = potential_components(p)?;
    let reach = 1.25 * c.x0_plus.abs().max(c.x0_minus.abs()) + 0.25 * x_scale(p) + 1.0;
    Ok((-reach, reach))
}

pub fn landscape(p: &ModelParams, xmin: f64, xmax: f64, n: usize) -> Result<SemiclassicalLandscape> {
    landscape_with(p, xmin, xmax, n, &LandscapeOptions::default())
}

/// [`landscape`] over [`default_range`].
pub fn landscape_auto(p: &ModelParams, n: usize) -> Result<SemiclassicalLandscape> {
    let (lo, hi) = default_range(p)?;
    landscape(p, lo, hi, n)
}

pub fn landscape_with(
    p: &ModelParams,
    xmin: f64,
    xmax: f64,
    n: usize,
    opts: &LandscapeOptions,
) -> Result<SemiclassicalLandscape> {
    let c = potential_components(p)?;
    for x0 in [c.x0_plus, c.x0_minus] {
        if x0 < xmin || x0 > xmax {
            return Err(Error::RangeTooNarrow { displacement: x0, xmin, xmax });
        }
    }
    if n < 3 {
        return Err(Error::Validation("landscape needs at least three samples".into()));
    }
    let mix = Mixing::new(p)?;
    let xc = x_scale(p);
    let slope_tol = 1e-10 * p.omega / xc;
    let step = (xmax - xmin) / (n - 1) as f64;
    let xs: Vec<f64> = (0..n).map(|i| if i + 1 == n { xmax } else { xmin + step * i as f64 }).collect();
    let vals: Vec<[f64; 4]> = xs.iter().map(|&x| mix.eval(x)).collect();

    let classify = |x: f64| -> StationaryPoint {
        let v = mix.eval(x);
        let kind = if v[2].abs() <= opts.curvature_tol * p.omega {
            StationaryKind::Inflection
        } else if v[2] > 0.0 {
            StationaryKind::Minimum
        } else {
            StationaryKind::Saddle
        };
        StationaryPoint { x, energy: v[0], slope: v[1], curvature: v[2], kind }
    };

    let mut points: Vec<StationaryPoint> = Vec::new();
    for i in 0..n - 1 {
        let (a, b) = (vals[i][1], vals[i + 1][1]);
        if a == 0.0 {
            points.push(classify(xs[i]));
        } else if a * b < 0.0 {
            let x = safeguarded_root(|x| {
                let v = mix.eval(x);
                (v[1], v[2])
            }, xs[i], xs[i + 1], slope_tol);
            points.push(classify(x));
        }
    }
    if vals[n - 1][1] == 0.0 {
        points.push(classify(xs[n - 1]));
    }

    // Shoulders: extrema of ∂ε/∂x that turn back toward zero without crossing it.
    for i in 0..n - 1 {
        let (a, b) = (vals[i][2], vals[i + 1][2]);
        if !(a * b < 0.0) {
            continue;
        }
        let x = safeguarded_root(|x| {
            let v = mix.eval(x);
            (v[2], v[3])
        }, xs[i], xs[i + 1], 1e-14 * p.omega);
        let v = mix.eval(x);
        let turning_back = (v[1] < 0.0 && v[3] < 0.0) || (v[1] > 0.0 && v[3] > 0.0);
        if !turning_back || v[1].abs() > opts.shoulder_tol * p.omega * xc {
            continue;
        }
        if points.iter().any(|s| (s.x - x).abs() <= 2.0 * step) {
            continue;
        }
        points.push(StationaryPoint { x, energy: v[0], slope: v[1], curvature: v[2], kind: StationaryKind::Inflection });
    }
    points.sort_by(|a, b| a.x.total_cmp(&b.x));
    let labels = (points.len() == 3).then(|| (points[0].x, points[1].x, points[2].x));
    let samples = xs.iter().zip(&vals).map(|(&x, v)| (x, v[0])).collect();
    Ok(SemiclassicalLandscape { samples, stationary_points: points, labels })
}

/// Root of `f` in a sign-changing bracket by Newton steps with bisection fallback.
fn safeguarded_root(f: impl Fn(f64) -> (f64, f64), mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let (flo, _) = f(lo);
    if flo > 0.0 {
        std::mem::swap(&mut lo, &mut hi);
    }
    // now f(lo) < 0 < f(hi)
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (fx, dfx) = f(x);
        if fx.abs() <= tol {
            return x;
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        let inside = (newton - lo) * (newton - hi) < 0.0;
        let next = if inside && dfx.is_finite() && dfx != 0.0 { newton } else { 0.5 * (lo + hi) };
        if next == x || (hi - lo).abs() <= f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
            return next;
        }
        x = next;
    }
    x
}

const BOUNDARY_SAMPLES: usize = 4001;

/// Outer minima `(x_L, x_R)` with their energies, when at least two exist.
fn competing_minima(p: &ModelParams) -> Result<Option<(StationaryPoint, StationaryPoint)>> {
    let land = landscape_auto(p, BOUNDARY_SAMPLES)?;
    let minima: Vec<_> = land.minima().copied().collect();
    if minima.len() < 2 {
        return Ok(None);
    }
    Ok(Some((minima[0], minima[minima.len() - 1])))
}

/// Free parameter for [`degeneracy_boundary`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FreeAxis {
    G1,
    Eps,
    G2,
}

impl FreeAxis {
    fn param(self) -> Param {
        match self {
            FreeAxis::G1 => Param::G1,
            FreeAxis::Eps => Param::Eps,
            FreeAxis::G2 => Param::G2,
        }
    }
}

/// Value of the free parameter (absolute units) at which the two outer minima
/// are degenerate, `ε(x_R) = ε(x_L)`.
///
/// When the minima are degenerate by symmetry wherever they exist, the
/// boundary is where the barrier between them first appears.
pub fn degeneracy_boundary(p: &ModelParams, free: FreeAxis, bracket: (f64, f64)) -> Result<f64> {
    const SCAN: usize = 48;
    let param = free.param();
    let at = |v: f64| {
        let mut q = *p;
        q.set(param, v);
        q
    };
    let (lo, hi) = bracket;
    let diff = |v: f64| -> Result<Option<f64>> {
        Ok(competing_minima(&at(v))?.map(|(l, r)| r.energy - l.energy))
    };
    let tol = |a: f64, b: f64| (b - a).abs() <= 1e-10 * a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    let noise = 1e-12 * p.splitting.max(p.omega);

    let values: Vec<f64> = (0..=SCAN).map(|i| lo + (hi - lo) * i as f64 / SCAN as f64).collect();
    let diffs = values.iter().map(|&v| diff(v)).collect::<Result<Vec<_>>>()?;

    // Adjacent informative samples of opposite sign, allowing exact zeros between them.
    let mut last: Option<(usize, f64)> = None;
    for (i, d) in diffs.iter().enumerate() {
        let Some(f) = *d else {
            last = None;
            continue;
        };
        if f.abs() <= noise {
            continue;
        }
        if let Some((j, fj)) = last {
            if fj.signum() != f.signum() {
                let (mut a, mut b, mut fa) = (values[j], values[i], fj);
                while !tol(a, b) {
                    let m = 0.5 * (a + b);
                    match diff(m)? {
                        Some(fm) if fm.signum() == fa.signum() && fm != 0.0 => {
                            a = m;
                            fa = fm;
                        }
                        Some(_) => b = m,
                        None => return Err(Error::NotFound("competing minima vanish inside the bracket".into())),
                    }
                }
                return Ok(0.5 * (a + b));
            }
        }
        last = Some((i, f));
    }

    let symmetric = diffs.iter().flatten().all(|f| f.abs() <= noise) && diffs.iter().any(Option::is_some);
    let barrier = |v: f64| -> Result<bool> { Ok(landscape_auto(&at(v), BOUNDARY_SAMPLES)?.has_barrier()) };
    if symmetric {
        let flags = values.iter().map(|&v| barrier(v)).collect::<Result<Vec<_>>>()?;
        if let Some(i) = (0..SCAN).find(|&i| flags[i] != flags[i + 1]) {
            let (mut a, mut b) = (values[i], values[i + 1]);
            let fa = flags[i];
            while !tol(a, b) {
                let m = 0.5 * (a + b);
                if barrier(m)? == fa {
                    a = m;
                } else {
                    b = m;
                }
            }
            return Ok(0.5 * (a + b));
        }
    }
    Err(Error::NoCompetition { lo, hi })
}

/// Endpoint of a first-order line at fixed bias: the point where the two
/// competing minima and the barrier between them merge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlatteningPoint {
    /// `g2` in units of `g_t` (Stark factor folded in).
    pub g2_bar: f64,
    /// `g1` in units of `g_s`.
    pub g1_bar: f64,
    /// Position in units of `x_c`.
    pub x_bar: f64,
}

/// Solves `∂ε/∂x = ∂²ε/∂x² = ∂³ε/∂x³ = 0` for `(x, g1, g2)` on the `g2 < 0`
/// branch at the bias of `p`, where two degenerate minima merge with the
/// barrier between them. The solution is accepted only if slightly larger
/// `|g2|` opens a window with two minima.
pub fn saddle_flattening_point(p: &ModelParams) -> Result<FlatteningPoint> {
    validate_params(p)?;
    if !(p.eps > 0.0) {
        return Err(Error::DomainError("the flattening point needs a positive bias".into()));
    }
    let e = p.eps / p.splitting;
    let g2_guess = -(4.0 * e).cbrt();
    let g1_guess = (1.0 + e / g2_guess) * (1.0 - g2_guess * g2_guess).max(1e-6).sqrt();
    let mut z = [g2_guess, g1_guess, g2_guess];

    let model = |z: &[f64; 3]| -> ModelParams {
        let mut q = *p;
        q.chi = 0.0;
        q.g1 = z[1] * p.g_s();
        q.g2 = z[2] * p.g_t();
        q
    };
    let residual = |z: &[f64; 3]| -> Option<[f64; 3]> {
        if !(z[2].abs() < 1.0) || !(z[1] > 0.0) {
            return None;
        }
        let q = model(z);
        let xc = x_scale(&q);
        let v = variational_derivatives(&q, z[0] * xc).ok()?;
        Some([v[1] / (q.omega * xc), v[2] / q.omega, v[3] * xc / q.omega])
    };
    let norm = |r: &[f64; 3]| r.iter().map(|v| v * v).sum::<f64>().sqrt();

    let mut r = residual(&z).ok_or_else(|| Error::NotFound("initial guess outside the domain".into()))?;
    for _ in 0..100 {
        if norm(&r) < 1e-13 {
            break;
        }
        let mut jac = nalgebra::Matrix3::<f64>::zeros();
        for k in 0..3 {
            let h = 1e-7 * z[k].abs().max(1e-3);
            let (mut zp, mut zm) = (z, z);
            zp[k] += h;
            zm[k] -= h;
            let (Some(rp), Some(rm)) = (residual(&zp), residual(&zm)) else {
                return Err(Error::NotFound("flattening solve left the domain".into()));
            };
            for i in 0..3 {
                jac[(i, k)] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        let rhs = nalgebra::Vector3::new(-r[0], -r[1], -r[2]);
        let Some(step) = jac.lu().solve(&rhs) else {
            return Err(Error::NotFound("singular Jacobian in flattening solve".into()));
        };
        let mut lambda = 1.0;
        loop {
            let trial = [z[0] + lambda * step[0], z[1] + lambda * step[1], z[2] + lambda * step[2]];
            if let Some(rt) = residual(&trial) {
                if norm(&rt) < norm(&r) || lambda < 1e-6 {
                    z = trial;
                    r = rt;
                    break;
                }
            }
            lambda *= 0.5;
            if lambda < 1e-9 {
                return Err(Error::NotFound("flattening solve stalled".into()));
            }
        }
    }
    if norm(&r) > 1e-9 || !(z[2] < 0.0) {
        return Err(Error::NotFound(format!("no flattening point near g2 = {g2_guess:.4} g_t")));
    }

    // Two minima must coexist just past the endpoint.
    let beyond = 1.02 * z[2];
    let connects = (-400..=400).any(|k| {
        let g1 = z[1] * (1.0 + 2.5e-4 * k as f64);
        competing_minima(&model(&[z[0], g1, beyond])).ok().flatten().is_some()
    });
    if !connects {
        return Err(Error::NotFound("flattening point does not end a two-minimum region".into()));
    }
    Ok(FlatteningPoint { g2_bar: z[2], g1_bar: z[1], x_bar: z[0] })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scaled(omega: f64, g1_bar: f64, g2_bar: f64, eps: f64) -> ModelParams {
        let p = ModelParams::new(omega, 1.0);
        p.with_g1(g1_bar * p.g_s()).with_g2(g2_bar * p.g_t()).with_eps(eps)
    }

    #[test]
    fn components_without_nonlinear_coupling() {
        let p = ModelParams::new(0.2, 1.0).with_g1(0.1);
        let c = potential_components(&p).unwrap();
        let g1p = 2f64.sqrt() * 0.1 / 0.2;
        assert_eq!((c.m_plus, c.m_minus, c.varpi_plus, c.varpi_minus), (1.0, 1.0, 1.0, 1.0));
        assert!((c.x0_plus + g1p).abs() < 1e-15 && (c.x0_minus - g1p).abs() < 1e-15);
        assert_eq!((c.b_plus, c.b_minus), (0.0, 0.0));
        assert!((c.b0 + g1p * g1p / 2.0).abs() < 1e-15);
    }

    #[test]
    fn stark_component_identity() {
        // g2' = 0.2, χ = 1
        let p = ModelParams::new(1.0, 1.0).with_g2(0.1).with_chi(1.0);
        let c = potential_components(&p).unwrap();
        assert!((c.m_plus - 1.0).abs() < 1e-15);
        assert!((c.varpi_plus.powi(2) - 1.40).abs() < 1e-14);
        assert!((c.m_plus * c.varpi_plus.powi(2) - 1.4).abs() < 1e-14);
        assert!((c.m_minus * c.varpi_minus.powi(2) - 0.6).abs() < 1e-14);
        assert_eq!(c.b_plus, -c.b_minus);
    }

    #[test]
    fn zero_coupling_components_vanish() {
        let p = ModelParams::new(1.0, 1.0).with_g2(0.2);
        let c = potential_components(&p).unwrap();
        assert_eq!((c.x0_plus.abs(), c.x0_minus, c.b_plus, c.b0), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn bare_energy_at_origin() {
        let p = ModelParams::new(0.3, 1.0);
        assert!((variational_energy(&p, 0.0).unwrap() - plot_offset(&p)).abs() < 1e-15);
        assert_eq!(e0(&p), -0.15);
    }

    #[test]
    fn two_level_limit() {
        let p = ModelParams::new(0.01, 1.0).with_eps(0.3);
        let e = variational_energy(&p, 0.0).unwrap();
        assert!((e - (e0(&p) - (0.09f64 + 0.25).sqrt())).abs() < 1e-15);
    }

    #[test]
    fn symmetric_double_well_above_gs() {
        let p = scaled(0.01, 1.2, 0.0, 0.0);
        let land = landscape_auto(&p, 2001).unwrap();
        let kinds: Vec<_> = land.stationary_points.iter().map(|s| s.kind).collect();
        assert_eq!(kinds, vec![StationaryKind::Minimum, StationaryKind::Saddle, StationaryKind::Minimum]);
        let (xl, xs, xr) = land.labels.unwrap();
        assert!((xl + xr).abs() < 1e-8 && xs.abs() < 1e-8);
        let el = land.stationary_points[0].energy;
        assert!(el < variational_energy(&p, 0.0).unwrap());
        assert!((el - land.stationary_points[2].energy).abs() < 1e-13);
    }

    #[test]
    fn single_minimum_below_gs() {
        let p = scaled(0.01, 0.9, 0.0, 0.0);
        let land = landscape_auto(&p, 2001).unwrap();
        assert_eq!(land.stationary_points.len(), 1);
        assert_eq!(land.stationary_points[0].kind, StationaryKind::Minimum);
        assert!(land.stationary_points[0].x.abs() < 1e-9);
    }

    #[test]
    fn stationary_points_meet_slope_tolerance() {
        let p = scaled(0.001, 1.3, 0.2, 0.002);
        let land = landscape_auto(&p, 4001).unwrap();
        let tol = 1e-10 * p.omega / x_scale(&p);
        assert!(!land.stationary_points.is_empty());
        for s in &land.stationary_points {
            assert!(s.slope.abs() <= tol, "{s:?} vs {tol}");
        }
    }

    #[test]
    fn shoulder_is_inflection_not_saddle() {
        let p = scaled(0.001, 0.5, -0.81, 0.005);
        let land = landscape_auto(&p, 4001).unwrap();
        assert!(!land.has_barrier());
        let shoulder = land
            .stationary_points
            .iter()
            .find(|s| s.kind == StationaryKind::Inflection)
            .expect("shoulder point");
        assert!(shoulder.x < 0.0);
        assert_eq!(land.minima().count(), 1);
    }

    #[test]
    fn range_must_cover_displacements() {
        let p = scaled(0.01, 1.2, 0.0, 0.0);
        assert!(matches!(landscape(&p, -1.0, 1.0, 100), Err(Error::RangeTooNarrow { .. })));
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let p = scaled(0.05, 1.1, -0.3, 0.01).with_chi(0.2);
        for x in [-7.0, -2.0, 0.3, 4.0] {
            let v = variational_derivatives(&p, x).unwrap();
            let h = 1e-4;
            let vp = variational_derivatives(&p, x + h).unwrap();
            let vm = variational_derivatives(&p, x - h).unwrap();
            for k in 0..3 {
                let fd = (vp[k] - vm[k]) / (2.0 * h);
                assert!((fd - v[k + 1]).abs() <= 1e-6 * v[k + 1].abs().max(1e-6), "order {k} at {x}");
            }
        }
    }

    #[test]
    fn round_boundary_from_degeneracy() {
        let p = scaled(0.01, 0.0, 0.6, 0.0);
        let g1c = degeneracy_boundary(&p, FreeAxis::G1, (0.5 * p.g_s(), 1.1 * p.g_s())).unwrap();
        assert!((g1c / p.g_s() - 0.8).abs() < 1e-8, "{}", g1c / p.g_s());
    }

    #[test]
    fn tilted_bias_boundary_from_degeneracy() {
        // Pinned against an independent brute-force minimization on a fine grid.
        let p = scaled(0.01, 1.2, 0.5, 0.0);
        let ec = degeneracy_boundary(&p, FreeAxis::Eps, (0.0, 0.5)).unwrap();
        assert!((ec - 0.174_895_833_3).abs() < 1e-8, "{ec}");
        // The closed form 0.1928 is the leading term near the round boundary.
        let p = scaled(0.01, 0.87, 0.5, 0.0);
        let ec = degeneracy_boundary(&p, FreeAxis::Eps, (0.0, 0.1)).unwrap();
        let closed = 0.5 * (0.87 / 0.75f64.sqrt() - 1.0);
        assert!((ec / closed - 1.0).abs() < 3e-3, "{ec} vs {closed}");
    }

    #[test]
    fn flat_bottom_onset_at_gs() {
        let p = scaled(0.01, 0.0, 0.0, 0.0);
        let g1c = degeneracy_boundary(&p, FreeAxis::G1, (0.5 * p.g_s(), 1.5 * p.g_s())).unwrap();
        assert!((g1c / p.g_s() - 1.0).abs() < 1e-8, "{}", g1c / p.g_s());
    }

    #[test]
    fn no_competition_reported() {
        let p = scaled(0.01, 0.0, 0.0, 0.0);
        let r = degeneracy_boundary(&p, FreeAxis::G1, (0.1 * p.g_s(), 0.5 * p.g_s()));
        assert!(matches!(r, Err(Error::NoCompetition { .. })));
    }

    #[test]
    fn flattening_point_matches_caption_location() {
        let p = ModelParams::new(0.001, 1.0).with_eps(0.05);
        let f = saddle_flattening_point(&p).unwrap();
        assert!((f.g1_bar - 0.763).abs() < 2e-3, "{f:?}");
        assert!((f.g2_bar + 0.5506).abs() < 2e-3, "{f:?}");
    }
}
