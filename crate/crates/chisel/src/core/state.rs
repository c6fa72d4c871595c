use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::core::grid::Grid;
use crate::error::{Error, Result};

/// Sampled complex wavefunction with a time stamp and its survival
/// probability (current norm relative to τ = 0).
#[derive(Debug, Clone)]
pub struct WaveState {
    pub amplitudes: Vec<Complex64>,
    /// Dimensionless time τ = ω_r t.
    pub tau: f64,
    /// Norm relative to the initial state; in (0, 1] for purely
    /// absorptive potentials.
    pub survival: f64,
}

/// Initial-state family for the pipelines.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialKind {
    /// Constant amplitude (broad incoming wave).
    Uniform,
    /// e^{i κ0 ξ} with κ0 on the momentum comb.
    PlaneWave { kappa0: f64 },
    /// Explicit samples, normalized on construction.
    #[serde(skip)]
    Custom(Vec<Complex64>),
}

/// Builds a unit-norm initial state at τ = 0.
pub fn make_initial_state(grid: &Grid, kind: &InitialKind) -> Result<WaveState> {
    let n = grid.len();
    let amplitudes = match kind {
        InitialKind::Uniform => {
            let a = 1.0 / grid.length().sqrt();
            vec![Complex64::new(a, 0.0); n]
        }
        InitialKind::PlaneWave { kappa0 } => {
            if grid.comb_bin(*kappa0).is_none() {
                return Err(Error::Config(format!(
                    "plane-wave momentum {kappa0} is not on the grid comb (spacing {})",
                    grid.kappa_spacing()
                )));
            }
            let a = 1.0 / grid.length().sqrt();
            grid.xi()
                .iter()
                .map(|&xi| a * Complex64::new(0.0, kappa0 * xi).exp())
                .collect()
        }
        InitialKind::Custom(samples) => {
            if samples.len() != n {
                return Err(Error::Shape(format!(
                    "custom initial state has {} samples, grid has {n}",
                    samples.len()
                )));
            }
            let norm = grid.norm(samples);
            if norm <= 0.0 || !norm.is_finite() {
                return Err(Error::Parameter("custom initial state has zero or non-finite norm".into()));
            }
            let scale = 1.0 / norm.sqrt();
            samples.iter().map(|a| a * scale).collect()
        }
    };
    Ok(WaveState { amplitudes, tau: 0.0, survival: 1.0 })
}

impl WaveState {
    pub fn norm(&self, grid: &Grid) -> f64 {
        grid.norm(&self.amplitudes)
    }

    pub fn all_finite(&self) -> bool {
        self.amplitudes.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }
}
