//! Interaction-length sweeps through the standing-wave absorption
//! profile, with optional Raman-Nath companion curves and velocity
//! averaging. One evolution per velocity class covers every Δz via
//! snapshots.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::core::{
    make_initial_state, resolution_guard, DimensionlessParams, Grid, InitialKind, PhysicalParams,
    PotentialSpec, WaveState,
};
use crate::error::{Error, Result};
use crate::harness::velocity::{velocity_average, velocity_draws, VelocityAveraging, VelocityDraw};
use crate::observables::{diffraction_amplitudes, windowed_efficiencies, Normalization};
use crate::propagator::{evolve_with_snapshots, raman_nath_evolve, EvolveConfig};

/// Full sweep request.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub omega0_over_gamma: Vec<f64>,
    /// Interaction lengths in μm, strictly increasing.
    pub dz_um: Vec<f64>,
    #[serde(default)]
    pub velocity_averaging: Option<VelocityAveraging>,
    /// Orders reported: n ∈ [−n_orders, n_orders].
    pub n_orders: i32,
    /// Also compute the kinetic-free companion curves.
    #[serde(default)]
    pub raman_nath: bool,
    /// Where the CLI writes results; unused by the in-memory pipeline.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.omega0_over_gamma.is_empty() || self.dz_um.is_empty() {
            return Err(Error::Config("sweep needs at least one omega0 and one dz".into()));
        }
        if self.dz_um.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("dz_um must be strictly increasing".into()));
        }
        if self.n_orders < 0 {
            return Err(Error::Config("n_orders must be >= 0".into()));
        }
        Ok(())
    }
}

/// Normalized efficiencies per interaction length for one Rabi frequency.
#[derive(Debug, Clone)]
pub struct EfficiencyCurve {
    pub omega0_over_gamma: f64,
    pub dz_um: Vec<f64>,
    pub orders: Vec<i32>,
    /// `eta[i][j]`: normalized efficiency of `orders[j]` at `dz_um[i]`.
    pub eta: Vec<Vec<f64>>,
    pub survival: Vec<f64>,
}

impl EfficiencyCurve {
    /// Column of one order across the sweep.
    pub fn order_column(&self, n: i32) -> Option<Vec<f64>> {
        let j = self.orders.iter().position(|&o| o == n)?;
        Some(self.eta.iter().map(|row| row[j]).collect())
    }
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub curves: Vec<EfficiencyCurve>,
    pub raman_nath: Option<Vec<EfficiencyCurve>>,
}

/// s for one Rabi frequency from the physical ratios.
pub fn coupling_for(phys: &PhysicalParams, omega0_over_gamma: f64) -> Result<DimensionlessParams> {
    DimensionlessParams::from_s(
        omega0_over_gamma * omega0_over_gamma / (2.0 * phys.omega_r_over_gamma()),
    )
}

/// Raw per-order intensities and survival for one evolved state;
/// exact comb bins on-axis, full ±1 momentum windows once a
/// quasimomentum offset moves flux off the comb.
fn raw_intensities(grid: &Grid, state: &WaveState, n_orders: i32, on_comb: bool) -> Result<Vec<f64>> {
    let mut row = if on_comb {
        let table = diffraction_amplitudes(grid, state, n_orders, Normalization::Raw)?;
        table.efficiencies
    } else {
        windowed_efficiencies(grid, state, n_orders)
    };
    row.push(state.survival);
    Ok(row)
}

fn run_one_curve(
    phys: &PhysicalParams,
    grid: &Grid,
    omega0_over_gamma: f64,
    cfg: &SweepConfig,
    raman: bool,
    parallel: bool,
) -> Result<EfficiencyCurve> {
    let dimless = coupling_for(phys, omega0_over_gamma)?;
    let spec = PotentialSpec::SinusoidalImaginary { s: dimless.s };
    resolution_guard(&spec, grid)?;
    let v = spec.sample(grid)?;
    let dt = EvolveConfig::auto_dt(grid, &v);
    let averaging = cfg.velocity_averaging.unwrap_or_else(VelocityAveraging::none);
    let draws = velocity_draws(phys, &averaging);
    let n_cols = (2 * cfg.n_orders + 1) as usize + 1;

    let eval = |draw: &VelocityDraw| -> Result<Vec<f64>> {
        // round the quasimomentum to the comb so the Bloch phase is exact
        let spacing = grid.kappa_spacing();
        let kappa0 = (draw.kappa_t / spacing).round() * spacing;
        let on_comb = kappa0 == 0.0;
        let initial = make_initial_state(grid, &InitialKind::PlaneWave { kappa0 })?;
        let mut steps: Vec<usize> = cfg
            .dz_um
            .iter()
            .map(|&dz| (phys.tau_of_dz_um_at(dz, draw.v_l) / dt).round() as usize)
            .collect();
        let step_targets = steps.clone();
        steps.sort_unstable();
        steps.dedup();
        let flat: Vec<f64> = if raman {
            step_targets
                .iter()
                .map(|&k| {
                    let state = raman_nath_evolve(grid, &initial, &v, k as f64 * dt)?;
                    raw_intensities(grid, &state, cfg.n_orders, on_comb)
                })
                .collect::<Result<Vec<Vec<f64>>>>()?
                .into_iter()
                .flatten()
                .collect()
        } else {
            let snaps = evolve_with_snapshots(grid, &initial, &v, dt, &steps, false)?;
            step_targets
                .iter()
                .map(|&k| {
                    let idx = steps.binary_search(&k).unwrap();
                    raw_intensities(grid, &snaps[idx], cfg.n_orders, on_comb)
                })
                .collect::<Result<Vec<Vec<f64>>>>()?
                .into_iter()
                .flatten()
                .collect()
        };
        Ok(flat)
    };

    let averaged = velocity_average(&draws, eval, parallel)?;
    let mut eta = Vec::with_capacity(cfg.dz_um.len());
    let mut survival = Vec::with_capacity(cfg.dz_um.len());
    for (i, _) in cfg.dz_um.iter().enumerate() {
        let row = &averaged[i * n_cols..(i + 1) * n_cols];
        let raw = &row[..n_cols - 1];
        let total: f64 = raw.iter().sum();
        if total <= 0.0 {
            return Err(Error::Data(format!(
                "no flux left in the reported orders at dz = {} um",
                cfg.dz_um[i]
            )));
        }
        eta.push(raw.iter().map(|x| x / total).collect());
        survival.push(row[n_cols - 1]);
    }
    Ok(EfficiencyCurve {
        omega0_over_gamma,
        dz_um: cfg.dz_um.clone(),
        orders: (-cfg.n_orders..=cfg.n_orders).collect(),
        eta,
        survival,
    })
}

fn run_sweep_impl(phys: &PhysicalParams, grid: &Grid, cfg: &SweepConfig, parallel: bool) -> Result<SweepResult> {
    cfg.validate()?;
    phys.validate()?;
    let curves = cfg
        .omega0_over_gamma
        .iter()
        .map(|&o| run_one_curve(phys, grid, o, cfg, false, parallel))
        .collect::<Result<Vec<_>>>()?;
    let raman_nath = if cfg.raman_nath {
        Some(
            cfg.omega0_over_gamma
                .iter()
                .map(|&o| run_one_curve(phys, grid, o, cfg, true, parallel))
                .collect::<Result<Vec<_>>>()?,
        )
    } else {
        None
    };
    Ok(SweepResult { curves, raman_nath })
}

/// Runs the sweep, distributing velocity classes over the worker pool.
pub fn run_diffraction_sweep(phys: &PhysicalParams, grid: &Grid, cfg: &SweepConfig) -> Result<SweepResult> {
    run_sweep_impl(phys, grid, cfg, true)
}

/// Sequential reference implementation of the same sweep.
pub fn run_diffraction_sweep_seq(phys: &PhysicalParams, grid: &Grid, cfg: &SweepConfig) -> Result<SweepResult> {
    run_sweep_impl(phys, grid, cfg, false)
}
