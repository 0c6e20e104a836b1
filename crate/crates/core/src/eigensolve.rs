//! Lowest eigenpair of the truncated Hamiltonian and the truncation escalation loop.
//!
//! Small problems go through a dense symmetric eigensolver. Larger ones locate a
//! shift just below the ground energy by bisection on band Cholesky
//! factorizations, then run Lanczos with full reorthogonalization on the
//! shift-inverted operator.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::banded::{BandCholesky, BandedSymmetricMatrix};
use crate::error::{Error, Result};
use crate::model::{build_hamiltonian, estimate_truncation, validate_params, ModelParams};

/// Knobs shared by the eigensolver and the escalation loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Relative energy agreement required between successive truncations.
    pub tol: f64,
    /// Residual bound, relative to `max(ω, |E|)`.
    pub residual_tol: f64,
    /// Largest acceptable weight in the top 10% of Fock levels.
    pub tail_tol: f64,
    /// Ceiling on Fock levels per spin.
    pub max_levels: usize,
    /// Problems up to this dimension use the dense solver.
    pub dense_max_dim: usize,
    /// Iteration cap, as a multiple of the dimension.
    pub matvec_factor: usize,
    /// Seed of the start vector.
    pub seed: u64,
    /// Gaps below `degeneracy_tol · Ω` flag the ground state as quasi-degenerate.
    pub degeneracy_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            residual_tol: 1e-10,
            tail_tol: 1e-12,
            max_levels: 1 << 17,
            dense_max_dim: 128,
            matvec_factor: 10,
            seed: 0x5eed_0001,
            degeneracy_tol: 1e-8,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

/// Lowest eigenpair of one matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub energy: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
    /// Estimate of `E1 - E0`, when available.
    pub gap: Option<f64>,
    /// Operator applications spent (0 on the dense path).
    pub matvecs: usize,
}

/// Converged ground state of the model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundSolution {
    pub energy: f64,
    /// Coefficients `c_{n,s}` in the interleaved basis.
    pub coeffs: Vec<f64>,
    /// Fock cutoff N; levels `0..=N` per spin.
    pub truncation_used: usize,
    pub residual_norm: f64,
    pub tail_weight: f64,
    pub escalations: usize,
    pub gap: Option<f64>,
    pub quasi_degenerate: bool,
}

impl GroundSolution {
    pub fn levels(&self) -> usize {
        self.coeffs.len() / 2
    }

    /// Up/down amplitudes of Fock level `n`.
    pub fn amplitudes(&self, n: usize) -> (f64, f64) {
        (self.coeffs[2 * n], self.coeffs[2 * n + 1])
    }
}

/// Previous solution used to seed a nearby solve.
#[derive(Debug, Clone, PartialEq)]
pub struct WarmStart {
    pub energy: f64,
    pub vector: Vec<f64>,
}

impl WarmStart {
    pub fn from_solution(sol: &GroundSolution) -> Self {
        Self { energy: sol.energy, vector: sol.coeffs.clone() }
    }

    /// Start vector padded with zeros or truncated to `dim`.
    fn vector_for(&self, dim: usize) -> Vec<f64> {
        let mut v = vec![0.0; dim];
        let k = dim.min(self.vector.len());
        v[..k].copy_from_slice(&self.vector[..k]);
        v
    }
}

/// Probability in the top 10% of Fock levels.
pub fn tail_weight(coeffs: &[f64]) -> f64 {
    let levels = coeffs.len() / 2;
    let tail = (levels / 10).max(1);
    coeffs[2 * (levels - tail)..].iter().map(|c| c * c).sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn residual_norm(h: &BandedSymmetricMatrix, v: &[f64], e: f64) -> f64 {
    let hv = h.matvec(v);
    hv.iter().zip(v).map(|(a, b)| (a - e * b).powi(2)).sum::<f64>().sqrt()
}

/// Fixes the global sign: the first entry of largest magnitude is positive.
fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() * (1.0 + 1e-9) {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Deterministic start vector with uniform positive entries.
pub fn seed_vector(dim: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..dim).map(|_| 0.5 + 0.5 * rng.random::<f64>()).collect();
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    v
}

/// Dense reference solver: full spectrum, lowest pair.
pub fn dense_ground(h: &BandedSymmetricMatrix) -> Eigenpair {
    let dense: DMatrix<f64> = h.to_dense();
    let eig = SymmetricEigen::new(dense);
    let mut order: Vec<usize> = (0..h.dim()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let i0 = order[0];
    let energy = eig.eigenvalues[i0];
    let mut vector: Vec<f64> = eig.eigenvectors.column(i0).iter().copied().collect();
    let nv = norm(&vector);
    vector.iter_mut().for_each(|x| *x /= nv);
    fix_sign(&mut vector);
    let gap = order.get(1).map(|&i1| eig.eigenvalues[i1] - energy);
    let residual = residual_norm(h, &vector, energy);
    Eigenpair { energy, vector, residual, gap, matvecs: 0 }
}

/// Shift `σ` just below the ground energy, its factor, and the bisected
/// boundary `E0` of positive definiteness.
fn bracket_shift(h: &BandedSymmetricMatrix, hint: Option<f64>) -> (f64, BandCholesky, f64) {
    let diag = h.diagonal();
    let dmin = diag.iter().copied().fold(f64::INFINITY, f64::min);
    let glo = h.gershgorin_lower();
    let mut lo = glo - 1e-3 * (glo.abs() + 1.0);
    let mut hi = dmin;
    let mut lo_chol = None;

    if let Some(e) = hint {
        let scale = (hi - lo).abs().max(1e-300);
        let mut delta = 1e-6 * scale;
        while delta < scale {
            let a = e - delta;
            let b = e + delta;
            if a > lo {
                if let Some(c) = h.shifted_cholesky(a) {
                    if b < hi && h.shifted_cholesky(b).is_none() {
                        lo = a;
                        hi = b;
                        lo_chol = Some(c);
                        break;
                    }
                    lo = a;
                    lo_chol = Some(c);
                } else if a < hi {
                    hi = a;
                }
            }
            delta *= 16.0;
        }
    }

    let mut chol = match lo_chol {
        Some(c) => c,
        None => h
            .shifted_cholesky(lo)
            .expect("Gershgorin bound must give a positive definite shift"),
    };
    for _ in 0..200 {
        let width = hi - lo;
        let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        if width <= 4.0 * f64::EPSILON * scale {
            break;
        }
        let mid = lo + 0.5 * width;
        if mid <= lo || mid >= hi {
            break;
        }
        match h.shifted_cholesky(mid) {
            Some(c) => {
                lo = mid;
                chol = c;
            }
            None => hi = mid,
        }
    }
    // Step back from E0 so the inverted spectrum keeps the second level above rounding.
    let span = (h.gershgorin_upper() - glo).abs().max(lo.abs()).max(f64::MIN_POSITIVE);
    let sigma = lo - 1e-9 * span;
    match h.shifted_cholesky(sigma) {
        Some(c) => (sigma, c, lo),
        None => (lo, chol, lo),
    }
}

/// Lanczos on `(H - σI)^{-1}` with full reorthogonalization and restarts.
fn shift_invert_lanczos(
    h: &BandedSymmetricMatrix,
    sigma: f64,
    chol: &BandCholesky,
    start: &[f64],
    target: f64,
    max_matvecs: usize,
) -> Option<Eigenpair> {
    const BLOCK: usize = 32;
    let dim = h.dim();
    let mut q0 = start.to_vec();
    let n0 = norm(&q0);
    if !(n0 > 0.0) || !n0.is_finite() {
        return None;
    }
    q0.iter_mut().for_each(|x| *x /= n0);

    let mut matvecs = 0;
    let mut best: Option<Eigenpair> = None;
    while matvecs < max_matvecs {
        let m = BLOCK.min(dim);
        let mut basis: Vec<Vec<f64>> = vec![q0.clone()];
        let mut alpha = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);
        let mut candidate = None;
        for k in 0..m {
            let mut w = basis[k].clone();
            chol.solve_in_place(&mut w);
            matvecs += 1;
            let a = dot(&basis[k], &w);
            alpha.push(a);
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(q, &w);
                    w.iter_mut().zip(q).for_each(|(wi, qi)| *wi -= c * qi);
                }
            }
            let b = norm(&w);
            let kk = k + 1;
            let t = DMatrix::from_fn(kk, kk, |i, j| {
                if i == j {
                    alpha[i]
                } else if i == j + 1 {
                    beta[j]
                } else if j == i + 1 {
                    beta[i]
                } else {
                    0.0
                }
            });
            let eig = SymmetricEigen::new(t);
            let mut order: Vec<usize> = (0..kk).collect();
            order.sort_by(|&x, &y| eig.eigenvalues[y].abs().total_cmp(&eig.eigenvalues[x].abs()));
            let mu1 = eig.eigenvalues[order[0]];
            let s1 = eig.eigenvectors.column(order[0]);
            let estimate = b * s1[kk - 1].abs();
            let exhausted = b <= 1e-14 * mu1.abs() || kk == dim;
            let second_settled = order.get(1).is_none_or(|&i| {
                let s2 = eig.eigenvectors.column(i);
                b * s2[kk - 1].abs() <= 1e-8 * eig.eigenvalues[i].abs()
            });
            if (estimate <= 1e-12 * mu1.abs() && second_settled) || exhausted || k + 1 == m {
                let mut v = vec![0.0; dim];
                for (j, q) in basis.iter().enumerate() {
                    let c = s1[j];
                    v.iter_mut().zip(q).for_each(|(vi, qi)| *vi += c * qi);
                }
                let nv = norm(&v);
                v.iter_mut().for_each(|x| *x /= nv);
                let energy = h.quadratic_form(&v);
                let residual = residual_norm(h, &v, energy);
                let gap = order.get(1).map(|&i| {
                    let e1 = sigma + 1.0 / eig.eigenvalues[i];
                    (e1 - energy).abs()
                });
                candidate = Some((Eigenpair { energy, vector: v, residual, gap, matvecs }, exhausted));
                if residual <= target || exhausted || k + 1 == m {
                    break;
                }
                candidate = None;
            }
            if b == 0.0 {
                break;
            }
            w.iter_mut().for_each(|x| *x /= b);
            beta.push(b);
            basis.push(w);
        }
        let Some((pair, exhausted)) = candidate else {
            break;
        };
        let done = pair.residual <= target || exhausted;
        q0 = pair.vector.clone();
        if best.as_ref().is_none_or(|b| pair.residual < b.residual) {
            best = Some(pair);
        }
        if done {
            break;
        }
    }
    best.map(|mut b| {
        b.matvecs = matvecs;
        b
    })
}

/// Lowest eigenpair of a symmetric banded matrix.
///
/// `residual_tol` is absolute. The dense path is taken when the dimension does
/// not exceed `opts.dense_max_dim`.
pub fn ground_eigenpair(
    h: &BandedSymmetricMatrix,
    residual_tol: f64,
    opts: &SolverOptions,
) -> Result<Eigenpair> {
    ground_eigenpair_warm(h, residual_tol, opts, None)
}

/// [`ground_eigenpair`] seeded from a nearby solution. A warm start that does
/// not reach the residual target is discarded and the solve repeated from the
/// deterministic seed vector.
pub fn ground_eigenpair_warm(
    h: &BandedSymmetricMatrix,
    residual_tol: f64,
    opts: &SolverOptions,
    warm: Option<&WarmStart>,
) -> Result<Eigenpair> {
    let dim = h.dim();
    if dim <= opts.dense_max_dim {
        return Ok(dense_ground(h));
    }
    let max_matvecs = opts.matvec_factor * dim;
    if let Some(w) = warm {
        let (sigma, chol, e0) = bracket_shift(h, Some(w.energy));
        let start = w.vector_for(dim);
        if let Some(mut pair) = shift_invert_lanczos(h, sigma, &chol, &start, residual_tol, max_matvecs) {
            // A start vector orthogonal to the new ground state can lock onto a stale branch.
            let at_floor = pair.energy - e0 <= 10.0 * (e0 - sigma) + pair.residual;
            if pair.residual <= residual_tol && at_floor {
                fix_sign(&mut pair.vector);
                return Ok(pair);
            }
        }
    }
    let (sigma, chol, _) = bracket_shift(h, None);
    let start = seed_vector(dim, opts.seed);
    match shift_invert_lanczos(h, sigma, &chol, &start, residual_tol, max_matvecs) {
        Some(mut pair) if pair.residual <= residual_tol => {
            fix_sign(&mut pair.vector);
            Ok(pair)
        }
        Some(pair) => Err(Error::NoConvergence { matvecs: pair.matvecs, residual: pair.residual }),
        None => Err(Error::NoConvergence { matvecs: max_matvecs, residual: f64::NAN }),
    }
}

/// Ground state at one fixed cutoff.
pub fn solve_at_truncation(
    p: &ModelParams,
    n_max: usize,
    opts: &SolverOptions,
    warm: Option<&WarmStart>,
) -> Result<GroundSolution> {
    let h = build_hamiltonian(p, n_max)?;
    let target = |e: f64| opts.residual_tol * p.omega.max(e.abs());
    // Lower estimate of |E| so the absolute target is never looser than the contract.
    let dmin = h.diagonal().into_iter().fold(f64::INFINITY, f64::min);
    let guess = warm.map_or(dmin.min(0.0), |w| w.energy);
    let pair = ground_eigenpair_warm(&h, target(guess), opts, warm)?;
    if pair.residual > target(pair.energy) {
        return Err(Error::NoConvergence { matvecs: pair.matvecs, residual: pair.residual });
    }
    let quasi_degenerate = pair.gap.is_some_and(|g| g < opts.degeneracy_tol * p.splitting);
    Ok(GroundSolution {
        energy: pair.energy,
        tail_weight: tail_weight(&pair.vector),
        coeffs: pair.vector,
        truncation_used: n_max,
        residual_norm: pair.residual,
        escalations: 0,
        gap: pair.gap,
        quasi_degenerate,
    })
}

/// Ground state with the truncation doubled until the energy is stable and the
/// top levels are empty.
pub fn converged_ground(p: &ModelParams, opts: &SolverOptions) -> Result<GroundSolution> {
    converged_ground_warm(p, opts, None)
}

/// [`converged_ground`] with an optional warm start from a neighbouring point.
pub fn converged_ground_warm(
    p: &ModelParams,
    opts: &SolverOptions,
    warm: Option<&WarmStart>,
) -> Result<GroundSolution> {
    validate_params(p)?;
    let cap = opts.max_levels;
    let mut n = estimate_truncation(p);
    if n + 1 > cap {
        return Err(Error::TruncationCeiling { cap });
    }
    let mut escalations = 0;
    let mut current = solve_at_truncation(p, n, opts, warm)?;
    loop {
        let next_n = 2 * n;
        if next_n + 1 > cap {
            return Err(Error::TruncationCeiling { cap });
        }
        let seed = WarmStart::from_solution(&current);
        let next = solve_at_truncation(p, next_n, opts, Some(&seed))?;
        let drift = (next.energy - current.energy).abs();
        let scale = p.omega.max(next.energy.abs());
        if current.tail_weight <= opts.tail_tol && drift <= opts.tol * scale {
            current.escalations = escalations;
            return Ok(current);
        }
        n = next_n;
        current = next;
        escalations += 1;
    }
}
