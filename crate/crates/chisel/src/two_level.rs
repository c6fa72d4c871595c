//! The open two-level model behind the imaginary potential: ground and
//! excited components coupled by the standing wave, with the excited
//! state decaying out of the system,
//!
//!   i ∂_τ ψ_g = −∂²_ξ ψ_g + (Ω̄/2) sin ξ · ψ_e
//!   i ∂_τ ψ_e = −∂²_ξ ψ_e + (Ω̄/2) sin ξ · ψ_g − i (Γ̄/2) ψ_e
//!
//! with Ω̄ = Ω0/ω_r and Γ̄ = Γ/ω_r. The Ω/2 coupling convention makes
//! adiabatic elimination give V = Ω0² sin²ξ/(2Γ) for the ground channel,
//! i.e. a density decay rate (Ω0 k δx)²/Γ near a node. The split step
//! treats the local 2×2 coupling/decay block exactly; the kinetic term is
//! kept for both components.

use num_complex::Complex64;

use crate::core::Grid;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct TwoLevelState {
    pub ground: Vec<Complex64>,
    pub excited: Vec<Complex64>,
    pub tau: f64,
}

impl TwoLevelState {
    /// Uniform ground-state amplitude, empty excited state, unit norm.
    pub fn uniform_ground(grid: &Grid) -> Self {
        let a = 1.0 / grid.length().sqrt();
        TwoLevelState {
            ground: vec![Complex64::new(a, 0.0); grid.len()],
            excited: vec![Complex64::new(0.0, 0.0); grid.len()],
            tau: 0.0,
        }
    }

    /// Combined norm dξ Σ(|ψ_g|² + |ψ_e|²).
    pub fn norm(&self, grid: &Grid) -> f64 {
        grid.norm(&self.ground) + grid.norm(&self.excited)
    }
}

#[derive(Debug, Clone)]
pub struct TwoLevelTrajectory {
    pub snapshots: Vec<TwoLevelState>,
    pub final_state: TwoLevelState,
}

struct LocalPropagator {
    u11: Vec<Complex64>,
    u12: Vec<Complex64>,
    u22: Vec<Complex64>,
}

/// exp(−i h M) for the local block M = [[0, g], [g, −iΓ̄/2]], per point.
fn local_propagator(grid: &Grid, omega_bar: f64, gamma_bar: f64, h: f64) -> LocalPropagator {
    let b = Complex64::new(0.0, gamma_bar / 4.0);
    let c = Complex64::new(0.0, -gamma_bar / 4.0);
    let phase = (-Complex64::i() * c * h).exp();
    let n = grid.len();
    let mut u11 = Vec::with_capacity(n);
    let mut u12 = Vec::with_capacity(n);
    let mut u22 = Vec::with_capacity(n);
    for &xi in grid.xi() {
        let g = 0.5 * omega_bar * xi.sin();
        // B = [[b, g], [g, −b]], B² = (g² − Γ̄²/16)·I
        let mu2 = Complex64::new(g * g - gamma_bar * gamma_bar / 16.0, 0.0);
        let w = mu2.sqrt();
        let theta = w * h;
        let cos_t = theta.cos();
        // sin(θ)/w = h·sinc(θ); series below the rounding floor of sin
        let sin_over_w = if theta.norm() < 1e-6 {
            let t2 = theta * theta;
            h * (Complex64::new(1.0, 0.0) - t2 / 6.0 + t2 * t2 / 120.0)
        } else {
            theta.sin() / w
        };
        u11.push(phase * (cos_t - Complex64::i() * sin_over_w * b));
        u12.push(phase * (-Complex64::i() * sin_over_w * g));
        u22.push(phase * (cos_t + Complex64::i() * sin_over_w * b));
    }
    LocalPropagator { u11, u12, u22 }
}

fn validate(gamma_bar: f64, dt: f64, tau_final: f64) -> Result<()> {
    if gamma_bar < 10.0 {
        return Err(Error::Config(format!(
            "gamma_over_omega_r = {gamma_bar} below 10; the open-system model assumes ω_r << Γ"
        )));
    }
    if dt <= 0.0 || dt.is_nan() || tau_final < 0.0 {
        return Err(Error::Config("dt must be > 0 and tau_final >= 0".into()));
    }
    if dt * gamma_bar >= 0.2 {
        return Err(Error::Config(format!(
            "dt·Γ̄ = {:.3} violates the stiffness guard (< 0.2)",
            dt * gamma_bar
        )));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run(
    grid: &Grid,
    initial: &TwoLevelState,
    omega0_over_gamma: f64,
    gamma_over_omega_r: f64,
    dt: f64,
    tau_final: f64,
    observer_stride: usize,
    kinetic: bool,
) -> Result<TwoLevelTrajectory> {
    validate(gamma_over_omega_r, dt, tau_final)?;
    let omega_bar = omega0_over_gamma * gamma_over_omega_r;
    let local = local_propagator(grid, omega_bar, gamma_over_omega_r, dt / 2.0);
    let kin: Vec<Complex64> = grid
        .kappa()
        .iter()
        .map(|&k| Complex64::new(0.0, -k * k * dt).exp())
        .collect();
    if kinetic && dt * grid.kappa_max() * grid.kappa_max() >= 0.5 {
        return Err(Error::Config(format!(
            "dt·κ_max² = {:.3} violates the kinetic phase guard (< 0.5)",
            dt * grid.kappa_max() * grid.kappa_max()
        )));
    }

    let n_steps = (tau_final / dt).round() as usize;
    let mut state = initial.clone();
    let mut snapshots = vec![state.clone()];
    let stride = observer_stride.max(1);
    for k in 1..=n_steps {
        apply_local(&local, &mut state);
        if kinetic {
            grid.forward(&mut state.ground);
            grid.forward(&mut state.excited);
            for (a, m) in state.ground.iter_mut().zip(&kin) {
                *a *= m;
            }
            for (a, m) in state.excited.iter_mut().zip(&kin) {
                *a *= m;
            }
            grid.inverse(&mut state.ground);
            grid.inverse(&mut state.excited);
        }
        apply_local(&local, &mut state);
        state.tau = initial.tau + k as f64 * dt;
        if !state.norm(grid).is_finite() {
            return Err(Error::NumericalBlowup { step: k, detail: "non-finite norm in two-level evolve".into() });
        }
        if k % stride == 0 || k == n_steps {
            snapshots.push(state.clone());
        }
    }
    let final_state = state;
    Ok(TwoLevelTrajectory { snapshots, final_state })
}

fn apply_local(local: &LocalPropagator, state: &mut TwoLevelState) {
    for j in 0..state.ground.len() {
        let g = state.ground[j];
        let e = state.excited[j];
        state.ground[j] = local.u11[j] * g + local.u12[j] * e;
        state.excited[j] = local.u12[j] * g + local.u22[j] * e;
    }
}

/// Full two-level split-step evolution.
#[allow(clippy::too_many_arguments)]
pub fn evolve_two_level(
    grid: &Grid,
    initial: &TwoLevelState,
    omega0_over_gamma: f64,
    gamma_over_omega_r: f64,
    dt: f64,
    tau_final: f64,
    observer_stride: usize,
) -> Result<TwoLevelTrajectory> {
    run(grid, initial, omega0_over_gamma, gamma_over_omega_r, dt, tau_final, observer_stride, true)
}

/// Kinetic-free variant (local coupling/decay only), the per-point
/// two-level ODE. Diagnostic surface for checking the local steady state
/// |ψ_e/ψ_g| → Ω̄ |sin ξ|/Γ̄.
pub fn evolve_two_level_local(
    grid: &Grid,
    initial: &TwoLevelState,
    omega0_over_gamma: f64,
    gamma_over_omega_r: f64,
    dt: f64,
    tau_final: f64,
) -> Result<TwoLevelTrajectory> {
    run(grid, initial, omega0_over_gamma, gamma_over_omega_r, dt, tau_final, usize::MAX, false)
}
