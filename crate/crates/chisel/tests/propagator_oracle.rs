#![allow(clippy::excessive_precision)] // frozen multiprecision oracle values

//! The split-operator engine against independent oracles: a dense matrix
//! exponential, the closed-form Raman-Nath attenuation, and the analytic
//! Gaussian. Also the open two-level model against per-point integration
//! and its adiabatically eliminated limit.

mod support;

use chisel::analytic::{packet_width, GaussianSolutionParams};
use chisel::core::{make_grid, make_initial_state, InitialKind, PotentialSpec};
use chisel::observables::{diffraction_amplitudes, Normalization};
use chisel::propagator::{evolve, evolve_with_snapshots, raman_nath_evolve, EvolveConfig};
use chisel::two_level::{evolve_two_level, evolve_two_level_local, TwoLevelState};
use nalgebra::{Complex, DVector};
use num_complex::Complex64;
use support::*;

#[test]
fn split_step_matches_dense_exponential() {
    // 64 points, V = s sin²ξ, 100 steps of dτ = 1e−3 against exp(−iHτ)
    let grid = make_grid(4, 16).unwrap();
    let s = 1.0;
    let v = PotentialSpec::SinusoidalImaginary { s }.sample(&grid).unwrap();
    let initial = make_initial_state(&grid, &InitialKind::Uniform).unwrap();
    let dt = 1e-3;
    let steps = 100usize;
    let snaps = evolve_with_snapshots(&grid, &initial, &v, dt, &[steps], false).unwrap();
    let numeric = &snaps[0].amplitudes;

    let h = dense_hamiltonian(&grid, &v);
    let tau = dt * steps as f64;
    let propagator = expm(&(h * Complex::new(0.0, -tau)));
    let x0 = DVector::<Complex<f64>>::from_iterator(
        grid.len(),
        initial.amplitudes.iter().map(|a| Complex::new(a.re, a.im)),
    );
    let exact = &propagator * x0;
    let exact: Vec<Complex64> = exact.iter().map(|c| Complex64::new(c.re, c.im)).collect();

    let err = rel_l2(numeric, &exact);
    assert!(err < 1e-6, "relative L2 error vs dense exponential: {err}");
}

#[test]
fn splitting_is_second_order() {
    // halving dτ reduces the error against the dense oracle by ≈ 4×
    let grid = make_grid(4, 16).unwrap();
    let v = PotentialSpec::SinusoidalImaginary { s: 2.0 }.sample(&grid).unwrap();
    let initial = make_initial_state(&grid, &InitialKind::Uniform).unwrap();
    let tau = 0.16;

    let h = dense_hamiltonian(&grid, &v);
    let propagator = expm(&(h * Complex::new(0.0, -tau)));
    let x0 = DVector::<Complex<f64>>::from_iterator(
        grid.len(),
        initial.amplitudes.iter().map(|a| Complex::new(a.re, a.im)),
    );
    let exact_vec = &propagator * x0;
    let exact: Vec<Complex64> = exact_vec.iter().map(|c| Complex64::new(c.re, c.im)).collect();

    let mut errors = Vec::new();
    let mut dts = Vec::new();
    for halvings in 0..4 {
        let steps = 100usize << halvings;
        let dt = tau / steps as f64;
        let snaps = evolve_with_snapshots(&grid, &initial, &v, dt, &[steps], false).unwrap();
        errors.push(rel_l2(&snaps[0].amplitudes, &exact).ln());
        dts.push(dt.ln());
    }
    let order = slope(&dts, &errors);
    assert!((order - 2.0).abs() < 0.2, "convergence order {order}");
}

#[test]
fn parity_is_preserved() {
    // even initial state + even V keeps the odd component at rounding level
    let grid = make_grid(2, 64).unwrap();
    let v = PotentialSpec::SinusoidalImaginary { s: 3.0 }.sample(&grid).unwrap();
    let amps: Vec<Complex64> = grid
        .xi()
        .iter()
        .map(|&x| Complex64::new(1.0 + 0.5 * (2.0 * x).cos(), 0.2 * (4.0 * x).cos()))
        .collect();
    let initial = make_initial_state(&grid, &InitialKind::Custom(amps)).unwrap();
    let cfg = EvolveConfig { dt: 1e-4, tau_final: 0.5, observer_stride: 500, renormalize: false };
    let traj = evolve(&grid, &initial, &v, &cfg).unwrap();
    let n = grid.len();
    for snap in &traj.snapshots {
        let mut odd = 0.0f64;
        let mut total = 0.0f64;
        for j in 0..n {
            let mirrored = snap.amplitudes[(n - j) % n];
            odd += (snap.amplitudes[j] - mirrored).norm_sqr();
            total += snap.amplitudes[j].norm_sqr();
        }
        assert!((odd / total).sqrt() < 1e-10, "odd fraction at τ = {}", snap.tau);
    }
}

#[test]
fn quadratic_evolution_matches_analytic_width() {
    // uniform start in the quadratic imaginary potential: fitted density
    // width at ω̄0τ = 4 within 1% of the closed form
    let s = 2.0;
    let p = GaussianSolutionParams::new(s).unwrap();
    let grid = make_grid(4, 32).unwrap();
    let v = PotentialSpec::QuadraticImaginary { s }.sample(&grid).unwrap();
    let initial = make_initial_state(&grid, &InitialKind::Uniform).unwrap();
    let omega0_bar = 2.0 * s.sqrt();
    let tau = 4.0 / omega0_bar;
    let dt = EvolveConfig::auto_dt(&grid, &v);
    let steps = (tau / dt).round() as usize;
    let snaps = evolve_with_snapshots(&grid, &initial, &v, dt, &[steps], false).unwrap();
    let state = &snaps[0];
    let density: Vec<f64> = state.amplitudes.iter().map(|a| a.norm_sqr().max(1e-300).ln()).collect();
    let w_expect = packet_width(steps as f64 * dt, &p).unwrap();
    // ln|φ|² = const − ξ²/δξ²: the fitted slope gives the width
    let c = quadratic_coefficient(grid.xi(), &density, 1.5 * w_expect);
    let w_fit = (-1.0 / c).sqrt();
    assert_rel(w_fit, w_expect, 0.01, "fitted width");
}

#[test]
fn sinusoidal_survival_slope_near_quadratic_prediction() {
    // late-time log-survival slope within 3% of √(2s); needs a deep well
    // so the node mode sits below the delocalized band (gap ≈ s − √(2s))
    let s = 20.0;
    let grid = make_grid(2, 64).unwrap();
    let v = PotentialSpec::SinusoidalImaginary { s }.sample(&grid).unwrap();
    let initial = make_initial_state(&grid, &InitialKind::Uniform).unwrap();
    let omega0_bar = 2.0 * s.sqrt();
    let dt = EvolveConfig::auto_dt(&grid, &v);
    let taus: Vec<f64> = (0..=8).map(|k| (4.0 + 0.5 * k as f64) / omega0_bar).collect();
    let steps: Vec<usize> = taus.iter().map(|&t| (t / dt).round() as usize).collect();
    let snaps = evolve_with_snapshots(&grid, &initial, &v, dt, &steps, false).unwrap();
    let actual_taus: Vec<f64> = steps.iter().map(|&k| k as f64 * dt).collect();
    let lnn: Vec<f64> = snaps.iter().map(|s| s.survival.ln()).collect();
    let rate = -slope(&actual_taus, &lnn);
    let expect = (2.0 * s).sqrt();
    assert!(
        (rate - expect).abs() < 0.03 * expect,
        "survival slope {rate} vs quadratic-node prediction {expect}"
    );
}

#[test]
fn raman_nath_zeroth_order_quadrature() {
    // uniform start through e^{−sτ sin²ξ}: a_0 relative amplitude equals
    // (1/π)∫ e^{−sτ sin²} dξ = e^{−sτ/2} I0(sτ/2); frozen for sτ = 1
    let grid = make_grid(2, 64).unwrap();
    let s = 2.0;
    let tau = 0.5;
    let v = PotentialSpec::SinusoidalImaginary { s }.sample(&grid).unwrap();
    let initial = make_initial_state(&grid, &InitialKind::Uniform).unwrap();
    let state = raman_nath_evolve(&grid, &initial, &v, tau).unwrap();
    let table = diffraction_amplitudes(&grid, &state, 3, Normalization::Raw).unwrap();
    let a0 = table.amplitude(0).unwrap();
    let uniform_a0 = 1.0 / grid.length().sqrt() * grid.length().sqrt(); // spectrum of the unit-norm uniform state
    let ratio = a0.re / uniform_a0;
    assert!(a0.im.abs() < 1e-14);
    assert_close(ratio, 0.64503527044915006811, 1e-10, "raman-nath a0");
    // independent quadrature route
    let quad = simpson(|x| (-s * tau * x.sin().powi(2)).exp(), 0.0, std::f64::consts::PI, 2000)
        / std::f64::consts::PI;
    assert_close(ratio, quad, 1e-10, "raman-nath a0 vs quadrature");
}

#[test]
fn raman_nath_agrees_at_short_times() {
    // τ ≪ 1/max(V): relative L2 distance from the full evolution < 1e−3
    let grid = make_grid(2, 32).unwrap();
    let s = 2.0;
    let v = PotentialSpec::SinusoidalImaginary { s }.sample(&grid).unwrap();
    let initial = make_initial_state(&grid, &InitialKind::Uniform).unwrap();
    let tau = 0.01 / s * 0.01;
    let dt = tau / 4.0;
    let snaps = evolve_with_snapshots(&grid, &initial, &v, dt, &[4], false).unwrap();
    let rn = raman_nath_evolve(&grid, &initial, &v, 4.0 * dt).unwrap();
    let d = rel_l2(&snaps[0].amplitudes, &rn.amplitudes);
    assert!(d < 1e-3, "short-time distance {d}");
}

#[test]
fn steady_state_forms_where_raman_nath_keeps_drifting() {
    // normalized efficiencies stabilize (< 1e−3 change per unit ω̄0τ)
    // past ω̄0τ ≈ 5 while the kinetic-free companion still drifts
    let s = 20.0;
    let grid = make_grid(2, 64).unwrap();
    let v = PotentialSpec::SinusoidalImaginary { s }.sample(&grid).unwrap();
    let initial = make_initial_state(&grid, &InitialKind::Uniform).unwrap();
    let omega0_bar = 2.0 * s.sqrt();
    let dt = EvolveConfig::auto_dt(&grid, &v);
    let t1 = 6.5 / omega0_bar;
    let t2 = 7.5 / omega0_bar;
    let k1 = (t1 / dt).round() as usize;
    let k2 = (t2 / dt).round() as usize;
    let snaps = evolve_with_snapshots(&grid, &initial, &v, dt, &[k1, k2], false).unwrap();
    // report enough orders that the normalization does not hide the
    // slow Raman-Nath spreading over ever more orders
    let eta = |state: &chisel::core::WaveState| -> Vec<f64> {
        diffraction_amplitudes(&grid, state, 6, Normalization::Normalized)
            .unwrap()
            .efficiencies
    };
    let d_tau_bar = (k2 - k1) as f64 * dt * omega0_bar;
    let full_change = eta(&snaps[0])
        .iter()
        .zip(eta(&snaps[1]))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max)
        / d_tau_bar;
    assert!(full_change < 1e-3, "full model still drifting: {full_change} per unit ω̄0τ");

    let rn1 = raman_nath_evolve(&grid, &initial, &v, k1 as f64 * dt).unwrap();
    let rn2 = raman_nath_evolve(&grid, &initial, &v, k2 as f64 * dt).unwrap();
    let rn_change = eta(&rn1)
        .iter()
        .zip(eta(&rn2))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max)
        / d_tau_bar;
    assert!(rn_change > 1e-2, "raman-nath unexpectedly stationary: {rn_change}");
}

#[test]
fn two_level_local_steady_state() {
    // kinetic-free split step against per-point RK4, and the saturation
    // ratio |ψ_e/ψ_g| → Ω̄|sin ξ|/Γ̄
    let grid = make_grid(1, 32).unwrap();
    let gamma_bar = 200.0;
    let omega0_over_gamma = 0.1;
    let omega_bar = omega0_over_gamma * gamma_bar;
    let initial = TwoLevelState::uniform_ground(&grid);
    let dt = 5e-4;
    let tau = 0.2;
    let traj = evolve_two_level_local(&grid, &initial, omega0_over_gamma, gamma_bar, dt, tau).unwrap();
    let f = &traj.final_state;
    for (j, &xi) in grid.xi().iter().enumerate() {
        let g = 0.5 * omega_bar * xi.sin();
        // RK4 on i y' = M y per grid point
        let rhs = move |_t: f64, y: [Complex64; 2]| {
            [
                -Complex64::i() * g * y[1],
                -Complex64::i() * g * y[0] - Complex64::new(gamma_bar / 2.0, 0.0) * y[1],
            ]
        };
        let y = rk4_two_level(rhs, [initial.ground[j], Complex64::new(0.0, 0.0)], tau, 4000);
        assert!((y[0] - f.ground[j]).norm() < 1e-8 * initial.ground[j].norm(), "ground at {xi}");
        assert!((y[1] - f.excited[j]).norm() < 1e-8 * initial.ground[j].norm(), "excited at {xi}");
        // adiabatic ratio away from the node
        if xi.sin().abs() > 0.3 {
            let ratio = (f.excited[j] / f.ground[j]).norm();
            let expect = omega_bar * xi.sin().abs() / gamma_bar;
            assert_rel(ratio, expect, 0.05, &format!("saturation ratio at ξ = {xi}"));
        }
    }
}

#[test]
fn two_level_matches_eliminated_model() {
    // Ω0 = 0.1 Γ: ground-channel survival decay matches the one-channel
    // model with V = s sin²ξ, s = Ω̄²/(2Γ̄), within 5%. Γ̄ is chosen so the
    // well is deep (s = 20) and the asymptotic rate is clean.
    let grid = make_grid(1, 64).unwrap();
    let gamma_bar: f64 = 4000.0;
    let omega0_over_gamma: f64 = 0.1;
    let omega_bar = omega0_over_gamma * gamma_bar;
    let s = omega_bar * omega_bar / (2.0 * gamma_bar);
    let dt = 4e-5;
    let omega0_bar = 2.0 * s.sqrt();
    let tau_probe = [4.0 / omega0_bar, 6.0 / omega0_bar];

    let initial2 = TwoLevelState::uniform_ground(&grid);
    let traj = evolve_two_level(&grid, &initial2, omega0_over_gamma, gamma_bar, dt, tau_probe[1], 1)
        .unwrap();
    let ground_norm = |state: &TwoLevelState| grid.norm(&state.ground);
    let snap_at = |t: f64| {
        traj.snapshots
            .iter()
            .min_by(|a, b| (a.tau - t).abs().total_cmp(&(b.tau - t).abs()))
            .unwrap()
    };
    let rate2 = -(ground_norm(snap_at(tau_probe[1])) / ground_norm(snap_at(tau_probe[0]))).ln()
        / (tau_probe[1] - tau_probe[0]);

    let v = PotentialSpec::SinusoidalImaginary { s }.sample(&grid).unwrap();
    let initial1 = make_initial_state(&grid, &InitialKind::Uniform).unwrap();
    let steps: Vec<usize> = tau_probe.iter().map(|&t| (t / dt).round() as usize).collect();
    let snaps = evolve_with_snapshots(&grid, &initial1, &v, dt, &steps, false).unwrap();
    let rate1 = -(snaps[1].survival / snaps[0].survival).ln() / (tau_probe[1] - tau_probe[0]);

    assert_rel(rate2, rate1, 0.05, "two-level vs eliminated decay rate");
}
