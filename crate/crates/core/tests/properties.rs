use proptest::prelude::*;

use rabi_core::boundaries::{
    boundaries_finite_freq, boundary_low_freq, g1c_iv, g1c_round, polaron_params, SolveFor,
};
use rabi_core::eigensolve::{converged_ground, dense_ground, ground_eigenpair, solve_at_truncation, SolverOptions};
use rabi_core::model::{apply_parity, build_hamiltonian};
use rabi_core::observables::compute_observables;
use rabi_core::semiclassical::{landscape_auto, potentials, variational_derivatives, variational_energy, x_scale};
use rabi_core::sweep::{parse_config, print_config};
use rabi_core::ModelParams;

fn scaled(omega: f64, g1: f64, g2: f64, chi: f64, eps: f64) -> ModelParams {
    let p = ModelParams::new(omega, 1.0);
    p.with_g1(g1 * p.g_s()).with_g2(g2 * p.g_t()).with_chi(chi).with_eps(eps)
}

fn params() -> impl Strategy<Value = ModelParams> {
    (0.05f64..1.0, 0.0f64..2.0, -0.8f64..0.8, -0.05f64..0.05).prop_map(|(w, g1, g2, eps)| scaled(w, g1, g2, 0.0, eps))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hamiltonian_is_exactly_symmetric(p in params(), n in 4usize..60) {
        let h = build_hamiltonian(&p, n).unwrap().to_dense();
        prop_assert_eq!(h.clone(), h.transpose());
    }

    #[test]
    fn parity_commutes_on_the_parity_line(w in 0.05f64..1.0, g1 in 0.0f64..2.0, n in 4usize..40) {
        let p = scaled(w, g1, 0.0, 0.0, 0.0);
        let h = build_hamiltonian(&p, n).unwrap();
        let dim = h.dim();
        for k in 0..dim {
            let mut e = vec![0.0; dim];
            e[k] = 1.0;
            let hp = h.matvec(&apply_parity(&e));
            let ph = apply_parity(&h.matvec(&e));
            for (a, b) in hp.iter().zip(&ph) {
                prop_assert!((a - b).abs() <= 1e-14 * (1.0 + a.abs()));
            }
        }
    }

    #[test]
    fn iterative_matches_dense(p in params(), n in 70usize..512) {
        let h = build_hamiltonian(&p, n).unwrap();
        let dense = dense_ground(&h);
        let opts = SolverOptions { dense_max_dim: 0, ..SolverOptions::default() };
        let scale = p.omega.max(dense.energy.abs());
        let it = ground_eigenpair(&h, 1e-11 * scale, &opts).unwrap();
        prop_assert!((it.energy - dense.energy).abs() <= 1e-10 * scale);
        let overlap: f64 = it.vector.iter().zip(&dense.vector).map(|(a, b)| a * b).sum();
        let degenerate = it.gap.is_some_and(|g| g < 1e-8);
        prop_assert!(degenerate || (overlap.abs() - 1.0).abs() <= 1e-8, "overlap {}", overlap);
    }

    #[test]
    fn energy_does_not_increase_with_truncation(p in params(), n in 8usize..200) {
        let opts = SolverOptions::default();
        let a = solve_at_truncation(&p, n, &opts, None).unwrap();
        let b = solve_at_truncation(&p, 2 * n, &opts, None).unwrap();
        prop_assert!(b.energy <= a.energy + 1e-12 * p.omega.max(a.energy.abs()));
    }

    #[test]
    fn repeated_solves_are_bit_identical(p in params()) {
        let opts = SolverOptions::default();
        prop_assert_eq!(converged_ground(&p, &opts).unwrap().energy, converged_ground(&p, &opts).unwrap().energy);
    }

    #[test]
    fn joint_sign_flip(w in 0.1f64..1.0, g1 in 0.0f64..1.5, g2 in -0.6f64..0.6, eps in 0.001f64..0.05) {
        let p = scaled(w, g1, g2, 0.0, eps);
        let q = scaled(w, g1, -g2, 0.0, -eps);
        let opts = SolverOptions::default();
        let (a, b) = (converged_ground(&p, &opts).unwrap(), converged_ground(&q, &opts).unwrap());
        let (oa, ob) = (compute_observables(&a, &p).unwrap(), compute_observables(&b, &q).unwrap());
        prop_assert!((oa.sigma_z + ob.sigma_z).abs() <= 1e-9);
        prop_assert!((oa.x_mean + ob.x_mean).abs() <= 1e-9 * (1.0 + oa.x_mean.abs()));
        prop_assert!((oa.sigma_x - ob.sigma_x).abs() <= 1e-9);
    }

    #[test]
    fn x_tilde_is_bounded(p in params()) {
        let sol = converged_ground(&p, &SolverOptions::default()).unwrap();
        if let Ok(o) = compute_observables(&sol, &p) {
            for v in [o.x_tilde_plus, o.x_tilde_minus] {
                prop_assert!(v.abs() <= 1.0 + 1e-6, "x_tilde {}", v);
            }
        }
    }

    #[test]
    fn stark_scaling_of_potentials(w in 0.001f64..0.5, g1 in 0.0f64..2.0, g2t in -0.9f64..0.9, chi in -0.5f64..2.0, k in -1.0f64..1.0) {
        let a = scaled(w, g1, g2t / (1.0 + chi), chi, 0.01);
        let b = scaled(w, g1, g2t, 0.0, 0.01);
        let x = 3.0 * k * x_scale(&a);
        let (pa, pb) = (potentials(&a, x).unwrap(), potentials(&b, x).unwrap());
        prop_assert!((pa.0 - pb.0).abs() <= 1e-12 * (1.0 + pa.0.abs()));
        prop_assert!((pa.1 - pb.1).abs() <= 1e-12 * (1.0 + pa.1.abs()));
    }

    #[test]
    fn variational_energy_mirror_symmetry(w in 0.001f64..0.5, g1 in 0.0f64..2.0, g2 in -0.9f64..0.9, eps in -0.1f64..0.1, k in -1.0f64..1.0) {
        let p = scaled(w, g1, g2, 0.0, eps);
        let q = scaled(w, g1, -g2, 0.0, -eps);
        let x = 3.0 * k * x_scale(&p);
        let (a, b) = (variational_energy(&p, x).unwrap(), variational_energy(&q, -x).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn derivative_matches_central_difference(w in 0.001f64..0.5, g1 in 0.0f64..2.0, g2 in -0.9f64..0.9, eps in -0.1f64..0.1, k in -1.0f64..1.0) {
        let p = scaled(w, g1, g2, 0.0, eps);
        let xs = x_scale(&p);
        let x = 2.0 * k * xs;
        let h = 1e-5 * xs;
        let fd = (variational_energy(&p, x + h).unwrap() - variational_energy(&p, x - h).unwrap()) / (2.0 * h);
        let d = variational_derivatives(&p, x).unwrap()[1];
        prop_assert!((fd - d).abs() <= 1e-6 * (d.abs() + w / xs), "fd {} vs {}", fd, d);
    }

    #[test]
    fn low_frequency_reduces_to_round(g2 in -0.95f64..0.95, w in 0.001f64..0.5) {
        let p = scaled(w, 0.0, g2, 0.0, 0.0);
        let a = boundary_low_freq(&p, SolveFor::G1).unwrap().value;
        let b = g1c_round(&p).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * b.max(1e-300));
    }

    #[test]
    fn finite_frequency_pure_forms(w in 0.01f64..0.5, g1 in 1.01f64..3.0, g2 in -0.5f64..0.5, eps in -0.01f64..0.01) {
        let p = scaled(w, g1, 0.0, 0.0, eps);
        let pp = polaron_params(&p).unwrap();
        let b = boundaries_finite_freq(&p, SolveFor::Eps).unwrap();
        let pure = (1.0 - pp.t) * p.splitting / (4.0 * pp.delta_c * pp.zeta) * pp.overlap;
        prop_assert!((b.ii.value - pure).abs() <= 1e-12 * pure.max(1e-300));
        prop_assert_eq!(b.iv.value, 0.0);

        let q = scaled(w, g1, g2, 0.0, 0.0);
        let b = boundaries_finite_freq(&q, SolveFor::G2).unwrap();
        prop_assert_eq!(b.iv.value, 0.0);
        prop_assert!(b.ii.value > 0.0 && b.iii.value < 0.0);
    }

    #[test]
    fn boundary_sign_structure(w in 0.01f64..0.5, g1 in 1.01f64..3.0, g2 in -0.5f64..0.5, eps in -0.01f64..0.01) {
        let p = scaled(w, g1, g2, 0.0, eps);
        for form in [SolveFor::Eps, SolveFor::G2] {
            let b = boundaries_finite_freq(&p, form).unwrap();
            for v in [&b.ii, &b.iii, &b.iv] {
                prop_assert!(v.value.is_finite());
            }
            let ulps = 4.0 * f64::EPSILON * (b.ii.value.abs() + b.iii.value.abs() + b.iv.value.abs());
            prop_assert!((b.ii.value - b.iv.value + (b.iii.value - b.iv.value)).abs() <= ulps);
        }
    }

    #[test]
    fn g1c_iv_at_zero_bias_is_gs(w in 0.001f64..0.5, g2 in 0.01f64..0.99) {
        let p = scaled(w, 1.0, g2, 0.0, 0.0);
        prop_assert_eq!(g1c_iv(&p).unwrap().value, p.g_s());
    }

    #[test]
    fn config_round_trip(
        omega in 0.001f64..1.0,
        g2 in -0.9f64..0.9,
        start in 0.0f64..1.0,
        width in 0.1f64..2.0,
        count in 2usize..200,
        log in any::<bool>(),
        workers in 1usize..16,
        tol in 1e-14f64..1e-6,
    ) {
        let start = if log { start + 1e-3 } else { start };
        let text = format!(
            "task = scan\nomega = {omega}\ng2 = {g2}\nunits.eps = gt\naxis.g1 = {start}:{}:{count}{}\nworkers = {workers}\ntol = {tol}\n",
            start + width,
            if log { ":log" } else { "" }
        );
        let cfg = parse_config(&text).unwrap();
        prop_assert_eq!(parse_config(&print_config(&cfg)).unwrap(), cfg);
    }
}

#[test]
fn semiclassical_minimum_tracks_exact_energy_at_low_frequency() {
    let w = 0.001;
    for k in 0..10 {
        let g1 = 2.0 * k as f64 / 9.0;
        for (eps, g2) in [(0.0, 0.0), (0.002, 0.0), (0.0, 0.1), (0.002, -0.1)] {
            let p = scaled(w, g1, g2, 0.0, eps);
            let l = landscape_auto(&p, 4001).unwrap();
            let min = l.global_minimum().unwrap().energy;
            let ed = converged_ground(&p, &SolverOptions::default()).unwrap().energy;
            assert!((min - ed).abs() <= 3.0 * w, "g1={g1} eps={eps} g2={g2}: {min} vs {ed}");
        }
    }
}
