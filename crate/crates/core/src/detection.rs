//! Transition detection on one-dimensional scans, boundary tracing across a
//! second axis, and tricritical-point location.

use serde::{Deserialize, Serialize};

use crate::eigensolve::{converged_ground_warm, SolverOptions, WarmStart};
use crate::error::{Error, Result};
use crate::model::{Param, ParamPoint};
use crate::observables::{normalizing_displacement, observables_of, ObservableSet};
use crate::parallel::map_ordered;

/// A scan axis in the units of its parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: Param,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub log: bool,
}

impl Axis {
    pub fn linear(param: Param, start: f64, stop: f64, count: usize) -> Self {
        Self { param, start, stop, count, log: false }
    }

    pub fn log(param: Param, start: f64, stop: f64, count: usize) -> Self {
        Self { param, start, stop, count, log: true }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(Error::Validation(format!("axis {} needs at least 2 points", self.param)));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) || self.start == self.stop {
            return Err(Error::Validation(format!("axis {} needs a finite non-empty range", self.param)));
        }
        if self.log && !(self.start > 0.0 && self.stop > 0.0) {
            return Err(Error::Validation(format!("log axis {} needs positive bounds", self.param)));
        }
        Ok(())
    }

    /// Coordinate used for spacing, derivatives and refinement: `log10` on log axes.
    pub fn coord(&self, value: f64) -> f64 {
        if self.log {
            value.log10()
        } else {
            value
        }
    }

    pub fn value(&self, coord: f64) -> f64 {
        if self.log {
            10f64.powf(coord)
        } else {
            coord
        }
    }

    /// Length of the axis in coordinates.
    pub fn span(&self) -> f64 {
        (self.coord(self.stop) - self.coord(self.start)).abs()
    }

    /// Equally spaced in coordinates; endpoints exact.
    pub fn values(&self) -> Vec<f64> {
        let a = self.coord(self.start);
        let b = self.coord(self.stop);
        let last = self.count.saturating_sub(1).max(1) as f64;
        (0..self.count)
            .map(|i| {
                if i == 0 {
                    self.start
                } else if i + 1 == self.count {
                    self.stop
                } else {
                    self.value(a + (b - a) * i as f64 / last)
                }
            })
            .collect()
    }
}

/// Outcome at one scan value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub value: f64,
    pub energy: Option<f64>,
    pub observables: Option<ObservableSet>,
    /// Gap below the degeneracy tolerance; observables belong to an arbitrary
    /// superposition and the point is excluded from detection.
    pub quasi_degenerate: bool,
    pub truncation: usize,
    /// Normalizing displacement `|x0|` of `x̃±`; zero where `x̃±` is undefined.
    pub x0: f64,
    pub error: Option<String>,
}

impl ScanPoint {
    fn usable(&self) -> bool {
        self.observables.is_some() && !self.quasi_degenerate
    }

    fn sigma_z(&self) -> Option<f64> {
        self.observables.as_ref().filter(|_| !self.quasi_degenerate).map(|o| o.sigma_z)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub base: ParamPoint,
    pub axis: Axis,
    pub values: Vec<f64>,
    pub points: Vec<ScanPoint>,
    pub solver: SolverOptions,
}

impl ScanResult {
    pub fn energies(&self) -> Vec<Option<f64>> {
        self.points.iter().map(|p| p.energy).collect()
    }

    pub fn observables(&self) -> Vec<Option<ObservableSet>> {
        self.points.iter().map(|p| p.observables).collect()
    }

    /// Fraction of points with a solution.
    pub fn completion(&self) -> f64 {
        let ok = self.points.iter().filter(|p| p.observables.is_some()).count();
        ok as f64 / self.points.len().max(1) as f64
    }
}

/// Solves the model at one value of `param`, other parameters from `base`.
pub fn sample(
    base: &ParamPoint,
    param: Param,
    value: f64,
    solver: &SolverOptions,
    warm: Option<&WarmStart>,
) -> (ScanPoint, Option<WarmStart>) {
    let point = base.with(param, value);
    let failed = |e: Error| {
        (
            ScanPoint {
                value,
                energy: None,
                observables: None,
                quasi_degenerate: false,
                truncation: 0,
                x0: 0.0,
                error: Some(e.to_string()),
            },
            None,
        )
    };
    let p = match point.resolve() {
        Ok(p) => p,
        Err(e) => return failed(e),
    };
    let sol = match converged_ground_warm(&p, solver, warm) {
        Ok(s) => s,
        Err(e) => return failed(e),
    };
    let observables = match observables_of(&sol.coeffs, &p) {
        Ok(o) => o,
        Err(e) => return failed(e),
    };
    let next = WarmStart::from_solution(&sol);
    (
        ScanPoint {
            value,
            energy: Some(sol.energy),
            observables: Some(observables),
            quasi_degenerate: sol.quasi_degenerate,
            truncation: sol.truncation_used,
            x0: normalizing_displacement(&p).unwrap_or(0.0),
            error: None,
        },
        Some(next),
    )
}

/// Ground state and observables along `axis`, each point warm-started from its
/// predecessor. Failed points are recorded, not fatal.
pub fn scan_1d(base: &ParamPoint, axis: &Axis, solver: &SolverOptions) -> Result<ScanResult> {
    axis.validate()?;
    if axis.count < 16 {
        return Err(Error::Validation(format!("a scan needs at least 16 points, got {}", axis.count)));
    }
    let values = axis.values();
    let mut points = Vec::with_capacity(values.len());
    let mut warm: Option<WarmStart> = None;
    for &v in &values {
        let (pt, next) = sample(base, axis.param, v, solver, warm.as_ref());
        if next.is_some() {
            warm = next;
        }
        points.push(pt);
    }
    Ok(ScanResult { base: *base, axis: *axis, values, points, solver: *solver })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransitionOrder {
    First,
    SecondLike,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransitionSignal {
    SigmaZJump,
    SigmaXKink,
    XTildeShift,
    SusceptibilityPeak,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionPoint {
    pub location: f64,
    pub order: TransitionOrder,
    pub signal: TransitionSignal,
    /// `|Δ⟨σz⟩|` across the refined jump; 0 for second-like points.
    pub delta_sigma_z: f64,
    pub refined: bool,
    /// Coarse scan values bracketing the point.
    pub cell: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectOptions {
    /// Adjacent `|Δ⟨σz⟩|` that flags a first-order candidate.
    pub jump_threshold: f64,
    /// Peaks must exceed this multiple of the median derivative magnitude.
    pub peak_factor: f64,
    /// Peaks must also exceed this absolute slope, per axis span.
    pub peak_floor: f64,
    /// Refinement width relative to the axis span.
    pub refine_rel: f64,
    /// Candidates closer than this fraction of the span are merged.
    pub merge_rel: f64,
    /// `x̃±` derivatives are skipped where the spin weight is below this.
    pub rho_floor: f64,
    /// Offset, relative to the span, used for one-sided limits next to a
    /// quasi-degenerate point.
    pub degenerate_offset: f64,
    pub solver: SolverOptions,
    pub workers: usize,
}

impl Default for DetectOptions {
    fn default() -> Self {
        Self {
            jump_threshold: 0.1,
            peak_factor: 5.0,
            peak_floor: 1e-2,
            refine_rel: 1e-6,
            merge_rel: 0.1,
            rho_floor: 1e-6,
            degenerate_offset: 1e-8,
            solver: SolverOptions::default(),
            workers: 1,
        }
    }
}

struct Probe<'a> {
    base: &'a ParamPoint,
    axis: &'a Axis,
    solver: &'a SolverOptions,
}

impl Probe<'_> {
    fn at(&self, coord: f64, warm: Option<&WarmStart>) -> (ScanPoint, Option<WarmStart>) {
        sample(self.base, self.axis.param, self.axis.value(coord), self.solver, warm)
    }
}

struct Jump {
    location: f64,
    delta: f64,
    refined: bool,
}

/// Bisects `[a, b]` (coordinates) toward the larger `σz` change until the
/// bracket is narrower than `width`, then measures the jump there.
fn refine_jump(probe: &Probe, mut a: f64, mut sa: f64, mut b: f64, mut sb: f64, width: f64, offset: f64) -> Jump {
    let reach = (b - a).abs();
    let mut warm: Option<WarmStart> = None;
    let mut location = None;
    for _ in 0..200 {
        if (b - a).abs() <= width {
            break;
        }
        let m = 0.5 * (a + b);
        let (pt, next) = probe.at(m, warm.as_ref());
        if next.is_some() {
            warm = next;
        }
        match pt.sigma_z() {
            Some(sm) => {
                if (sb - sm).abs() >= (sm - sa).abs() {
                    a = m;
                    sa = sm;
                } else {
                    b = m;
                    sb = sm;
                }
            }
            None => {
                location = Some((m, pt.quasi_degenerate));
                break;
            }
        }
    }
    let (location, refined) = location.unwrap_or((0.5 * (a + b), (b - a).abs() <= width));
    let delta = jump_size(probe, location, width.max(offset), reach, warm.as_ref()).unwrap_or((sb - sa).abs());
    Jump { location, delta, refined }
}

/// Background-corrected `|Δσz|` across `u`: with `Δ(w) = |σz(u+w) − σz(u−w)|`
/// on doubling windows, `2Δ(w) − Δ(2w)` removes a linear background, so a
/// finite-width avoided crossing reports its full step once `w` covers it.
fn jump_size(probe: &Probe, u: f64, w_min: f64, w_max: f64, warm: Option<&WarmStart>) -> Option<f64> {
    let mut diffs = Vec::new();
    let mut w = w_min;
    while w <= w_max {
        let l = probe.at(u - w, warm).0.sigma_z();
        let r = probe.at(u + w, warm).0.sigma_z();
        diffs.push(match (l, r) {
            (Some(l), Some(r)) => Some((r - l).abs()),
            _ => None,
        });
        w *= 2.0;
    }
    let mut best: Option<f64> = None;
    for pair in diffs.windows(2) {
        if let (Some(d1), Some(d2)) = (pair[0], pair[1]) {
            let j = (2.0 * d1 - d2).max(0.0);
            best = Some(best.map_or(j, |b| b.max(j)));
        }
    }
    best.or_else(|| diffs.iter().flatten().copied().reduce(f64::max))
}

#[derive(Clone, Copy)]
enum Channel {
    SigmaZ,
    SigmaX,
    XTildePlus,
    XTildeMinus,
}

impl Channel {
    const ALL: [Channel; 4] = [Channel::SigmaZ, Channel::SigmaX, Channel::XTildePlus, Channel::XTildeMinus];

    fn signal(self) -> TransitionSignal {
        match self {
            Channel::SigmaZ => TransitionSignal::SusceptibilityPeak,
            Channel::SigmaX => TransitionSignal::SigmaXKink,
            Channel::XTildePlus | Channel::XTildeMinus => TransitionSignal::XTildeShift,
        }
    }

    fn read(self, pt: &ScanPoint, rho_floor: f64) -> Option<f64> {
        if !pt.usable() {
            return None;
        }
        let o = pt.observables.as_ref()?;
        match self {
            Channel::SigmaZ => Some(o.sigma_z),
            Channel::SigmaX => Some(o.sigma_x),
            Channel::XTildePlus => (pt.x0 > 0.0 && o.rho_plus >= rho_floor).then_some(o.x_tilde_plus),
            Channel::XTildeMinus => (pt.x0 > 0.0 && o.rho_minus >= rho_floor).then_some(o.x_tilde_minus),
        }
    }
}

struct Candidate {
    point: TransitionPoint,
    strength: f64,
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Golden-section search for the maximum of `|dO/du|` on `[lo, hi]`, the
/// derivative taken by central differences with half-step `h`.
fn refine_peak(probe: &Probe, channel: Channel, lo: f64, hi: f64, h: f64, tol: f64, rho_floor: f64) -> Option<f64> {
    let slope = |u: f64| -> Option<f64> {
        let (p1, w) = probe.at(u - h, None);
        let (p2, _) = probe.at(u + h, w.as_ref());
        let a = channel.read(&p1, rho_floor)?;
        let b = channel.read(&p2, rho_floor)?;
        Some(((b - a) / (2.0 * h)).abs())
    };
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = slope(c)?;
    let mut fd = slope(d)?;
    for _ in 0..60 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = slope(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = slope(d)?;
        }
    }
    Some(0.5 * (a + b))
}

/// First-order jumps and second-order-like susceptibility peaks of a scan.
///
/// Returns nothing when fewer than 90% of the points solved.
pub fn detect_transitions(scan: &ScanResult, opts: &DetectOptions) -> Vec<TransitionPoint> {
    if scan.completion() < 0.9 || scan.points.len() < 3 {
        return Vec::new();
    }
    let axis = &scan.axis;
    let probe = Probe { base: &scan.base, axis, solver: &opts.solver };
    let span = axis.span();
    let width = opts.refine_rel * span;
    let coords: Vec<f64> = scan.values.iter().map(|&v| axis.coord(v)).collect();
    let n = coords.len();
    let step = span / (n - 1) as f64;
    let mut candidates = Vec::new();

    // First-order: jumps between consecutive usable points.
    let usable: Vec<usize> = (0..n).filter(|&i| scan.points[i].usable()).collect();
    for pair in usable.windows(2) {
        let (i, j) = (pair[0], pair[1]);
        let sa = scan.points[i].sigma_z().unwrap();
        let sb = scan.points[j].sigma_z().unwrap();
        if (sb - sa).abs() <= opts.jump_threshold {
            continue;
        }
        let offset = opts.degenerate_offset * span;
        let jump = refine_jump(&probe, coords[i], sa, coords[j], sb, width, offset);
        let delta = jump.delta;
        let first = delta > opts.jump_threshold;
        candidates.push(Candidate {
            point: TransitionPoint {
                location: axis.value(jump.location),
                order: if first { TransitionOrder::First } else { TransitionOrder::SecondLike },
                signal: if first { TransitionSignal::SigmaZJump } else { TransitionSignal::SusceptibilityPeak },
                delta_sigma_z: if first { delta } else { 0.0 },
                refined: jump.refined,
                cell: (scan.values[i], scan.values[j]),
            },
            strength: if first { f64::INFINITY } else { (sb - sa).abs() / opts.jump_threshold },
        });
    }

    // Second-order-like: derivative peaks of each channel.
    for channel in Channel::ALL {
        let vals: Vec<Option<f64>> = scan.points.iter().map(|p| channel.read(p, opts.rho_floor)).collect();
        let mut deriv = vec![None; n];
        for i in 1..n - 1 {
            if let (Some(a), Some(_), Some(b)) = (vals[i - 1], vals[i], vals[i + 1]) {
                deriv[i] = Some(((b - a) / (coords[i + 1] - coords[i - 1])).abs());
            }
        }
        let mut present: Vec<f64> = deriv.iter().flatten().copied().collect();
        let threshold = (opts.peak_factor * median(&mut present)).max(opts.peak_floor / span);
        for i in 1..n - 1 {
            let Some(d) = deriv[i] else { continue };
            let left_ok = deriv[i - 1].is_none_or(|l| d >= l);
            let right_ok = deriv[i + 1].is_none_or(|r| d > r);
            if !(left_ok && right_ok && d > threshold) {
                continue;
            }
            let h = 0.25 * step;
            let (lo, hi) = (coords[i - 1].min(coords[i + 1]), coords[i - 1].max(coords[i + 1]));
            let refined = refine_peak(&probe, channel, lo + h, hi - h, h, (0.1 * h).max(width), opts.rho_floor);
            candidates.push(Candidate {
                point: TransitionPoint {
                    location: axis.value(refined.unwrap_or(coords[i])),
                    order: TransitionOrder::SecondLike,
                    signal: channel.signal(),
                    delta_sigma_z: 0.0,
                    refined: refined.is_some(),
                    cell: (scan.values[i - 1], scan.values[i + 1]),
                },
                strength: d / threshold,
            });
        }
    }

    // Polarization signals first, then strongest; suppress weaker candidates nearby.
    candidates.sort_by(|x, y| {
        let rank = |c: &Candidate| match c.point.signal {
            TransitionSignal::SigmaZJump => 3u8,
            TransitionSignal::SusceptibilityPeak => 2,
            TransitionSignal::SigmaXKink => 1,
            TransitionSignal::XTildeShift => 0,
        };
        rank(y).cmp(&rank(x)).then(y.strength.total_cmp(&x.strength))
    });
    let radius = (opts.merge_rel * span).max(2.0 * width);
    let mut kept: Vec<TransitionPoint> = Vec::new();
    for c in candidates {
        let u = axis.coord(c.point.location);
        if kept.iter().all(|k| (axis.coord(k.location) - u).abs() > radius) {
            kept.push(c.point);
        }
    }
    let ascending = axis.coord(axis.stop) > axis.coord(axis.start);
    kept.sort_by(|a, b| {
        let o = a.location.total_cmp(&b.location);
        if ascending {
            o
        } else {
            o.reverse()
        }
    });
    kept
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Detected,
    Analytic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub trace_value: f64,
    pub transition: TransitionPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurve {
    pub fixed: ParamPoint,
    pub scan_axis: Axis,
    pub trace_param: Param,
    pub points: Vec<CurvePoint>,
    pub provenance: Provenance,
    /// The family starts or ends inside the trace range.
    pub broken: bool,
}

/// Transitions of every slice of a trace, in trace order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSlices {
    pub trace_values: Vec<f64>,
    pub transitions: Vec<Vec<TransitionPoint>>,
    pub completion: Vec<f64>,
}

/// Scans and detects along `scan_axis` for every value of `trace_axis`.
/// Slices run in parallel; each slice is sequential.
pub fn trace_slices(fixed: &ParamPoint, scan_axis: &Axis, trace_axis: &Axis, opts: &DetectOptions) -> Result<TraceSlices> {
    trace_axis.validate()?;
    scan_axis.validate()?;
    if trace_axis.param == scan_axis.param {
        return Err(Error::Validation("trace and scan axes must differ".into()));
    }
    let trace_values = trace_axis.values();
    let results = map_ordered(&trace_values, opts.workers, |&t| -> Result<(Vec<TransitionPoint>, f64)> {
        let base = fixed.with(trace_axis.param, t);
        let scan = scan_1d(&base, scan_axis, &opts.solver)?;
        Ok((detect_transitions(&scan, opts), scan.completion()))
    });
    let mut transitions = Vec::with_capacity(results.len());
    let mut completion = Vec::with_capacity(results.len());
    for r in results {
        let (t, c) = r?;
        transitions.push(t);
        completion.push(c);
    }
    Ok(TraceSlices { trace_values, transitions, completion })
}

/// Links slice transitions into continuous families by nearest location, with
/// at most `max_step` (fraction of the scan span) between neighbours.
pub fn link_curves(fixed: &ParamPoint, scan_axis: &Axis, trace_param: Param, slices: &TraceSlices, max_step: f64) -> Vec<BoundaryCurve> {
    let limit = max_step * scan_axis.span();
    let last = slices.trace_values.len().saturating_sub(1);
    let mut open: Vec<BoundaryCurve> = Vec::new();
    let mut done: Vec<BoundaryCurve> = Vec::new();
    for (k, (&t, found)) in slices.trace_values.iter().zip(&slices.transitions).enumerate() {
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (ci, c) in open.iter().enumerate() {
            let prev = scan_axis.coord(c.points.last().unwrap().transition.location);
            for (ti, tp) in found.iter().enumerate() {
                let d = (scan_axis.coord(tp.location) - prev).abs();
                if d <= limit {
                    pairs.push((d, ci, ti));
                }
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut curve_used = vec![false; open.len()];
        let mut tp_used = vec![false; found.len()];
        for (_, ci, ti) in pairs {
            if curve_used[ci] || tp_used[ti] {
                continue;
            }
            curve_used[ci] = true;
            tp_used[ti] = true;
            open[ci].points.push(CurvePoint { trace_value: t, transition: found[ti] });
        }
        let mut still_open = Vec::new();
        for (ci, mut c) in open.into_iter().enumerate() {
            if curve_used[ci] {
                still_open.push(c);
            } else {
                c.broken = true;
                done.push(c);
            }
        }
        for (ti, tp) in found.iter().enumerate() {
            if !tp_used[ti] {
                still_open.push(BoundaryCurve {
                    fixed: *fixed,
                    scan_axis: *scan_axis,
                    trace_param,
                    points: vec![CurvePoint { trace_value: t, transition: *tp }],
                    provenance: Provenance::Detected,
                    broken: k != 0,
                });
            }
        }
        open = still_open;
    }
    let _ = last;
    done.extend(open);
    done.sort_by(|a, b| {
        let key = |c: &BoundaryCurve| (c.points[0].trace_value, c.points[0].transition.location);
        let (ka, kb) = (key(a), key(b));
        ka.0.total_cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
    });
    done
}

/// [`trace_slices`] followed by [`link_curves`] with a 10% continuity step.
pub fn trace_boundary(fixed: &ParamPoint, scan_axis: &Axis, trace_axis: &Axis, opts: &DetectOptions) -> Result<Vec<BoundaryCurve>> {
    let slices = trace_slices(fixed, scan_axis, trace_axis, opts)?;
    Ok(link_curves(fixed, scan_axis, trace_axis.param, &slices, 0.1))
}

/// `Δσz` at every point of a curve from the two-sided limits at `±refine_rel`
/// of the axis range around the refined jump.
pub fn delta_sigma_z_along(curve: &BoundaryCurve, opts: &DetectOptions) -> Vec<(f64, f64)> {
    let axis = &curve.scan_axis;
    let span = axis.span();
    map_ordered(&curve.points, opts.workers, |cp| {
        let base = curve.fixed.with(curve.trace_param, cp.trace_value);
        let probe = Probe { base: &base, axis, solver: &opts.solver };
        let (a, b) = (axis.coord(cp.transition.cell.0), axis.coord(cp.transition.cell.1));
        let sa = probe.at(a, None).0.sigma_z();
        let sb = probe.at(b, None).0.sigma_z();
        let delta = match (sa, sb) {
            (Some(sa), Some(sb)) => {
                let w = opts.refine_rel * span;
                let u = refine_jump(&probe, a, sa, b, sb, w, opts.degenerate_offset * span).location;
                match (probe.at(u - w, None).0.sigma_z(), probe.at(u + w, None).0.sigma_z()) {
                    (Some(l), Some(r)) => (r - l).abs(),
                    _ => f64::NAN,
                }
            }
            _ => f64::NAN,
        };
        (cp.trace_value, delta)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TricriticalKind {
    Crossing,
    Effective,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TricriticalPoint {
    pub trace_value: f64,
    pub location: f64,
    pub kind: TricriticalKind,
    pub separation: f64,
}

/// Where two curves sharing a trace axis meet: the first trace value with a
/// separation below `threshold` (scan coordinates) gives an effective point,
/// a sign change of the separation gives an interpolated crossing.
pub fn locate_tricritical(a: &BoundaryCurve, b: &BoundaryCurve, threshold: f64) -> Option<TricriticalPoint> {
    let axis = &a.scan_axis;
    let common: Vec<(f64, f64, f64)> = a
        .points
        .iter()
        .filter_map(|pa| {
            b.points
                .iter()
                .find(|pb| pb.trace_value == pa.trace_value)
                .map(|pb| (pa.trace_value, axis.coord(pa.transition.location), axis.coord(pb.transition.location)))
        })
        .collect();
    let mut prev: Option<(f64, f64, f64)> = None;
    for &(t, ua, ub) in &common {
        let d = ua - ub;
        if d.abs() <= threshold {
            return Some(TricriticalPoint {
                trace_value: t,
                location: axis.value(0.5 * (ua + ub)),
                kind: TricriticalKind::Effective,
                separation: d.abs(),
            });
        }
        if let Some((t0, ua0, ub0)) = prev {
            let d0 = ua0 - ub0;
            if d0.signum() != d.signum() {
                let f = d0 / (d0 - d);
                let u = ua0 + f * (ua - ua0);
                return Some(TricriticalPoint {
                    trace_value: t0 + f * (t - t0),
                    location: axis.value(u),
                    kind: TricriticalKind::Crossing,
                    separation: 0.0,
                });
            }
        }
        prev = Some((t, ua, ub));
    }
    None
}

/// Largest distance of a transition from `center`, in axis units.
pub fn transition_spread(points: &[TransitionPoint], center: f64) -> Option<f64> {
    points.iter().map(|p| (p.location - center).abs()).reduce(f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Unit;

    fn point(omega: f64) -> ParamPoint {
        ParamPoint::default().with(Param::Omega, omega)
    }

    #[test]
    fn axis_values_are_exact_at_ends() {
        let a = Axis::linear(Param::G1, 0.0, 2.0, 41);
        let v = a.values();
        assert_eq!(v.len(), 41);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[40], 2.0);
        assert!((v[20] - 1.0).abs() < 1e-15);
        let l = Axis::log(Param::G2, 1e-6, 1e-2, 5);
        let v = l.values();
        assert!((v[1] / 1e-5 - 1.0).abs() < 1e-12);
        assert!(Axis::log(Param::G2, 0.0, 1.0, 5).validate().is_err());
    }

    #[test]
    fn scan_needs_sixteen_points() {
        let r = scan_1d(&point(1.0), &Axis::linear(Param::G1, 0.0, 1.0, 8), &SolverOptions::default());
        assert!(matches!(r, Err(Error::Validation(_))));
    }

    #[test]
    fn parity_line_scan_has_no_polarization() {
        let axis = Axis::linear(Param::G1, -1.5, 1.5, 31);
        let scan = scan_1d(&point(0.1), &axis, &SolverOptions::default()).unwrap();
        for pt in &scan.points {
            if pt.quasi_degenerate {
                continue;
            }
            assert!(pt.observables.unwrap().sigma_z.abs() < 1e-6);
        }
    }

    #[test]
    fn failed_points_are_recorded() {
        // g2 beyond g_t has no ground state
        let axis = Axis::linear(Param::G2, 0.5, 1.2, 16);
        let scan = scan_1d(&point(0.1), &axis, &SolverOptions::default()).unwrap();
        let failed = scan.points.iter().filter(|p| p.error.is_some()).count();
        assert!(failed > 0 && failed < 16);
        assert!(scan.points.iter().filter(|p| p.value < 1.0).all(|p| p.error.is_none()));
    }

    #[test]
    fn antiferromagnetic_like_jump_in_g2() {
        let base = point(0.001).with(Param::G1, 0.9);
        let axis = Axis::linear(Param::G2, 0.0, 0.7, 29);
        let scan = scan_1d(&base, &axis, &SolverOptions::default()).unwrap();
        let sz: Vec<f64> = scan.points.iter().map(|p| p.observables.unwrap().sigma_z).collect();
        assert!(sz[..17].iter().all(|s| s.abs() < 1e-2));
        let found = detect_transitions(&scan, &DetectOptions::default());
        let first: Vec<_> = found.iter().filter(|t| t.order == TransitionOrder::First).collect();
        assert_eq!(first.len(), 1, "{found:?}");
        // Low-frequency dome: g2c = sqrt(1 - 0.81)
        assert!((first[0].location - 0.19f64.sqrt()).abs() < 0.02, "{found:?}");
        assert!(first[0].delta_sigma_z > 0.1);
    }

    #[test]
    fn biased_scan_below_gs_has_no_transition() {
        let base = point(0.001).with(Param::G1, 0.9).with_unit(Param::Eps, Unit::Gt);
        let axis = Axis::linear(Param::Eps, 0.0, 20.0, 41);
        let scan = scan_1d(&base, &axis, &SolverOptions::default()).unwrap();
        let found = detect_transitions(&scan, &DetectOptions::default());
        assert!(found.is_empty(), "{found:?}");
        let sz: Vec<f64> = scan.points.iter().map(|p| p.observables.unwrap().sigma_z).collect();
        assert!(sz.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn second_order_at_gs_and_first_order_on_dome() {
        let opts = DetectOptions::default();
        let base = point(0.01);
        let scan = scan_1d(&base, &Axis::linear(Param::G1, 0.5, 1.5, 41), &opts.solver).unwrap();
        let found = detect_transitions(&scan, &opts);
        assert_eq!(found.len(), 1, "{found:?}");
        assert_eq!(found[0].order, TransitionOrder::SecondLike);

        let base = point(0.01).with(Param::G2, 0.5);
        let scan = scan_1d(&base, &Axis::linear(Param::G1, 0.5, 1.5, 41), &opts.solver).unwrap();
        let found = detect_transitions(&scan, &opts);
        let first: Vec<_> = found.iter().filter(|t| t.order == TransitionOrder::First).collect();
        assert_eq!(first.len(), 1, "{found:?}");
        assert!((first[0].location / 0.75f64.sqrt() - 1.0).abs() < 0.02, "{found:?}");
    }

    #[test]
    fn refinement_is_stable_under_doubling() {
        let opts = DetectOptions::default();
        let base = point(0.01).with(Param::G2, 0.5);
        let locate = |n: usize| {
            let scan = scan_1d(&base, &Axis::linear(Param::G1, 0.5, 1.5, n), &opts.solver).unwrap();
            detect_transitions(&scan, &opts).into_iter().find(|t| t.order == TransitionOrder::First).unwrap().location
        };
        let (a, b) = (locate(21), locate(41));
        assert!((a - b).abs() <= 2.0 * opts.refine_rel * 1.0 + 1e-12, "{a} {b}");
    }

    fn curve(locs: &[(f64, f64)]) -> BoundaryCurve {
        BoundaryCurve {
            fixed: ParamPoint::default(),
            scan_axis: Axis::linear(Param::G1, 0.0, 2.0, 16),
            trace_param: Param::G2,
            points: locs
                .iter()
                .map(|&(t, l)| CurvePoint {
                    trace_value: t,
                    transition: TransitionPoint {
                        location: l,
                        order: TransitionOrder::First,
                        signal: TransitionSignal::SigmaZJump,
                        delta_sigma_z: 0.5,
                        refined: true,
                        cell: (l, l),
                    },
                })
                .collect(),
            provenance: Provenance::Detected,
            broken: false,
        }
    }

    #[test]
    fn tricritical_crossing_and_effective() {
        let a = curve(&[(0.0, 1.0), (1.0, 1.2), (2.0, 1.4)]);
        let b = curve(&[(0.0, 1.3), (1.0, 1.25), (2.0, 1.2)]);
        let t = locate_tricritical(&a, &b, 1e-6).unwrap();
        assert_eq!(t.kind, TricriticalKind::Crossing);
        assert!((t.trace_value - 1.0 - 0.05 / 0.25).abs() < 1e-12);
        let t = locate_tricritical(&a, &a, 1e-6).unwrap();
        assert_eq!(t.kind, TricriticalKind::Effective);
        assert_eq!(t.trace_value, 0.0);
        let c = curve(&[(0.0, 1.5), (1.0, 1.3), (2.0, 1.2)]);
        let far = curve(&[(0.0, 1.0), (1.0, 1.1), (2.0, 1.19)]);
        let t = locate_tricritical(&c, &far, 0.02).unwrap();
        assert_eq!((t.kind, t.trace_value), (TricriticalKind::Effective, 2.0));
        assert!(locate_tricritical(&c, &far, 1e-6).is_none());
    }

    #[test]
    fn linking_flags_curve_ends() {
        let fixed = ParamPoint::default();
        let axis = Axis::linear(Param::G1, 0.0, 2.0, 16);
        let tp = |l: f64| TransitionPoint {
            location: l,
            order: TransitionOrder::First,
            signal: TransitionSignal::SigmaZJump,
            delta_sigma_z: 0.5,
            refined: true,
            cell: (l, l),
        };
        let slices = TraceSlices {
            trace_values: vec![0.0, 1.0, 2.0, 3.0],
            transitions: vec![vec![tp(0.5)], vec![tp(0.55), tp(1.5)], vec![tp(0.6), tp(1.55)], vec![tp(0.62)]],
            completion: vec![1.0; 4],
        };
        let curves = link_curves(&fixed, &axis, Param::G2, &slices, 0.1);
        assert_eq!(curves.len(), 2);
        assert_eq!(curves[0].points.len(), 4);
        assert!(!curves[0].broken);
        assert_eq!(curves[1].points.len(), 2);
        assert!(curves[1].broken);
    }
}
