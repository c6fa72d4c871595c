//! Numerical time evolution of i ∂_τ φ = [−∂²_ξ − i V(ξ)] φ by Strang
//! splitting: a half-step of the (exact) absorption factor, a full
//! kinetic step in momentum space, and a second absorption half-step.
//! Second order in dτ; exact whenever either sub-operator vanishes.

use num_complex::Complex64;

use crate::core::{Grid, WaveState};
use crate::error::{Error, Result};

/// Time-stepping controls.
#[derive(Debug, Clone, Copy)]
pub struct EvolveConfig {
    /// Time step dτ.
    pub dt: f64,
    /// Target final time; executed as round(τ_final/dτ) steps of exactly dτ.
    pub tau_final: f64,
    /// Steps between observable snapshots.
    pub observer_stride: usize,
    /// Rescale to unit norm after each step while `survival` keeps the
    /// true cumulative norm (used for eigenmode extraction).
    pub renormalize: bool,
}

impl EvolveConfig {
    pub fn new(dt: f64, tau_final: f64) -> Self {
        EvolveConfig { dt, tau_final, observer_stride: 100, renormalize: false }
    }

    /// Largest step satisfying both accuracy guards, with a safety factor
    /// of 2: dτ·max(V) < 0.1 and dτ·κ_max² < 0.5.
    pub fn auto_dt(grid: &Grid, v: &[f64]) -> f64 {
        let vmax = v.iter().cloned().fold(0.0f64, f64::max);
        let kin_limit = 0.5 / (grid.kappa_max() * grid.kappa_max());
        let pot_limit = if vmax > 0.0 { 0.1 / vmax } else { f64::INFINITY };
        0.5 * kin_limit.min(pot_limit)
    }

    pub fn validate(&self, grid: &Grid, v: &[f64]) -> Result<()> {
        if self.dt <= 0.0 || !self.dt.is_finite() {
            return Err(Error::Config(format!("dt must be > 0, got {}", self.dt)));
        }
        if self.tau_final < 0.0 {
            return Err(Error::Config(format!("tau_final must be >= 0, got {}", self.tau_final)));
        }
        let vmax = v.iter().cloned().fold(0.0f64, f64::max);
        if self.dt * vmax >= 0.1 {
            return Err(Error::Config(format!(
                "dt·max(V) = {:.3} violates the potential-step guard (< 0.1)",
                self.dt * vmax
            )));
        }
        let kmax2 = grid.kappa_max() * grid.kappa_max();
        if self.dt * kmax2 >= 0.5 {
            return Err(Error::Config(format!(
                "dt·κ_max² = {:.3} violates the kinetic phase guard (< 0.5)",
                self.dt * kmax2
            )));
        }
        Ok(())
    }
}

/// Precomputed Strang-step multipliers for one (grid, V, dτ) choice.
pub struct Stepper<'g> {
    grid: &'g Grid,
    half_pot: Vec<f64>,
    kinetic: Vec<Complex64>,
    dt: f64,
}

impl<'g> Stepper<'g> {
    pub fn new(grid: &'g Grid, v: &[f64], dt: f64) -> Result<Self> {
        if v.len() != grid.len() {
            return Err(Error::Shape(format!(
                "potential has {} samples, grid has {}",
                v.len(),
                grid.len()
            )));
        }
        if v.iter().any(|x| *x < 0.0 || !x.is_finite()) {
            return Err(Error::Parameter("potential must be finite and >= 0".into()));
        }
        EvolveConfig { dt, tau_final: 0.0, observer_stride: 1, renormalize: false }.validate(grid, v)?;
        let half_pot = v.iter().map(|&x| (-x * dt / 2.0).exp()).collect();
        let kinetic = grid
            .kappa()
            .iter()
            .map(|&k| Complex64::new(0.0, -k * k * dt).exp())
            .collect();
        Ok(Stepper { grid, half_pot, kinetic, dt })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// One Strang step in place.
    pub fn step(&self, amplitudes: &mut [Complex64]) {
        for (a, &h) in amplitudes.iter_mut().zip(&self.half_pot) {
            *a *= h;
        }
        self.grid.forward(amplitudes);
        for (a, k) in amplitudes.iter_mut().zip(&self.kinetic) {
            *a *= k;
        }
        self.grid.inverse(amplitudes);
        for (a, &h) in amplitudes.iter_mut().zip(&self.half_pot) {
            *a *= h;
        }
    }
}

/// One Strang step of size dτ applied to a state.
pub fn split_step(grid: &Grid, state: &WaveState, v: &[f64], dt: f64) -> Result<WaveState> {
    let stepper = Stepper::new(grid, v, dt)?;
    let mut amplitudes = state.amplitudes.clone();
    let norm_before = grid.norm(&amplitudes);
    stepper.step(&mut amplitudes);
    let norm_after = grid.norm(&amplitudes);
    if !norm_after.is_finite() {
        return Err(Error::NumericalBlowup { step: 1, detail: "non-finite norm after split step".into() });
    }
    let ratio = if norm_before > 0.0 { norm_after / norm_before } else { 0.0 };
    Ok(WaveState { amplitudes, tau: state.tau + dt, survival: state.survival * ratio })
}

/// Snapshots at selected step counts plus the final state.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<WaveState>,
    pub final_state: WaveState,
}

/// Core stepping loop with snapshots at the given (sorted, deduplicated)
/// step indices; index 0 is the initial state.
pub fn evolve_with_snapshots(
    grid: &Grid,
    initial: &WaveState,
    v: &[f64],
    dt: f64,
    snapshot_steps: &[usize],
    renormalize: bool,
) -> Result<Vec<WaveState>> {
    let stepper = Stepper::new(grid, v, dt)?;
    let n_steps = snapshot_steps.iter().copied().max().unwrap_or(0);
    let mut amplitudes = initial.amplitudes.clone();
    let mut survival = initial.survival;
    let mut norm_prev = grid.norm(&amplitudes);
    if renormalize && norm_prev > 0.0 {
        let scale = 1.0 / norm_prev.sqrt();
        for a in amplitudes.iter_mut() {
            *a *= scale;
        }
        norm_prev = 1.0;
    }
    let mut out = Vec::with_capacity(snapshot_steps.len());
    let mut want = snapshot_steps.iter().copied().peekable();
    let push_snapshot = |amps: &Vec<Complex64>, k: usize, survival: f64, out: &mut Vec<WaveState>| {
        out.push(WaveState {
            amplitudes: amps.clone(),
            tau: initial.tau + k as f64 * dt,
            survival,
        });
    };
    while want.peek() == Some(&0) {
        push_snapshot(&amplitudes, 0, survival, &mut out);
        want.next();
    }
    for k in 1..=n_steps {
        stepper.step(&mut amplitudes);
        let norm = grid.norm(&amplitudes);
        if !norm.is_finite() {
            return Err(Error::NumericalBlowup { step: k, detail: "non-finite norm during evolve".into() });
        }
        let ratio = if norm_prev > 0.0 { norm / norm_prev } else { 0.0 };
        survival *= ratio;
        if renormalize && norm > 0.0 {
            let scale = 1.0 / norm.sqrt();
            for a in amplitudes.iter_mut() {
                *a *= scale;
            }
            norm_prev = 1.0;
        } else {
            norm_prev = norm;
        }
        while want.peek() == Some(&k) {
            push_snapshot(&amplitudes, k, survival, &mut out);
            want.next();
        }
    }
    Ok(out)
}

/// Repeated split stepping with snapshots every `observer_stride` steps
/// (always including the initial and final states).
pub fn evolve(grid: &Grid, initial: &WaveState, v: &[f64], cfg: &EvolveConfig) -> Result<Trajectory> {
    cfg.validate(grid, v)?;
    let n_steps = (cfg.tau_final / cfg.dt).round() as usize;
    if n_steps == 0 {
        let final_state = initial.clone();
        return Ok(Trajectory { snapshots: vec![initial.clone()], final_state });
    }
    let stride = cfg.observer_stride.max(1);
    let mut steps: Vec<usize> = (0..=n_steps).step_by(stride).collect();
    if *steps.last().unwrap() != n_steps {
        steps.push(n_steps);
    }
    let snapshots = evolve_with_snapshots(grid, initial, v, cfg.dt, &steps, cfg.renormalize)?;
    let final_state = snapshots.last().unwrap().clone();
    Ok(Trajectory { snapshots, final_state })
}

/// Raman-Nath (thin grating) evolution: kinetic term dropped, so the
/// state is just attenuated pointwise, φ(ξ,τ) = φ(ξ,0) e^{−V(ξ)τ}.
pub fn raman_nath_evolve(grid: &Grid, initial: &WaveState, v: &[f64], tau: f64) -> Result<WaveState> {
    if v.len() != grid.len() {
        return Err(Error::Shape(format!("potential has {} samples, grid has {}", v.len(), grid.len())));
    }
    if tau < 0.0 {
        return Err(Error::Parameter(format!("tau must be >= 0, got {tau}")));
    }
    let norm_before = grid.norm(&initial.amplitudes);
    let amplitudes: Vec<Complex64> = initial
        .amplitudes
        .iter()
        .zip(v)
        .map(|(a, &vv)| a * (-vv * tau).exp())
        .collect();
    let norm_after = grid.norm(&amplitudes);
    let ratio = if norm_before > 0.0 { norm_after / norm_before } else { 0.0 };
    Ok(WaveState { amplitudes, tau: initial.tau + tau, survival: initial.survival * ratio })
}

/// Survival probability dξ Σ|φ|² relative to the τ = 0 normalization.
pub fn survival(state: &WaveState) -> f64 {
    state.survival
}
