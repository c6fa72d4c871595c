use serde::{Deserialize, Serialize};

use crate::core::grid::Grid;
use crate::error::{Error, Result};

/// Declarative description of the imaginary part V(ξ) of a potential
/// −iV(ξ), V ≥ 0 (absorption only).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum PotentialSpec {
    /// V = s ξ², the small-ξ expansion of the standing wave around a node.
    QuadraticImaginary { s: f64 },
    /// V = s sin²ξ, the full standing-wave absorption profile.
    SinusoidalImaginary { s: f64 },
    /// V = 2 s̃ (q ξ / k)^{2n}, the masked power-law profile; `q_over_k` ≪ 1
    /// sets its width and s̃ is Ω0²/(2Γ) in units of ω_r.
    PowerLaw { n: u32, q_over_k: f64, s_tilde: f64 },
    /// Explicit samples, one per grid point.
    #[serde(skip)]
    Custom { samples: Vec<f64> },
}

impl PotentialSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            PotentialSpec::QuadraticImaginary { s } | PotentialSpec::SinusoidalImaginary { s } => {
                if *s <= 0.0 || !s.is_finite() {
                    return Err(Error::Parameter(format!("absorption strength s must be > 0, got {s}")));
                }
            }
            PotentialSpec::PowerLaw { n, q_over_k, s_tilde } => {
                if *n == 0 {
                    return Err(Error::Parameter(
                        "power-law exponent n must be >= 1 (n = 0 is uniform absorption, no localization)".into(),
                    ));
                }
                if *q_over_k <= 0.0 || *s_tilde <= 0.0 || q_over_k.is_nan() || s_tilde.is_nan() {
                    return Err(Error::Parameter(format!(
                        "power-law parameters must be > 0, got q/k = {q_over_k}, s_tilde = {s_tilde}"
                    )));
                }
            }
            PotentialSpec::Custom { samples } => {
                if samples.iter().any(|v| *v < 0.0 || !v.is_finite()) {
                    return Err(Error::Parameter("custom potential samples must be finite and >= 0".into()));
                }
            }
        }
        Ok(())
    }

    /// Elementwise evaluation on the grid.
    pub fn sample(&self, grid: &Grid) -> Result<Vec<f64>> {
        self.validate()?;
        match self {
            PotentialSpec::QuadraticImaginary { s } => {
                Ok(grid.xi().iter().map(|&xi| s * xi * xi).collect())
            }
            PotentialSpec::SinusoidalImaginary { s } => {
                Ok(grid.xi().iter().map(|&xi| s * xi.sin().powi(2)).collect())
            }
            PotentialSpec::PowerLaw { n, q_over_k, s_tilde } => {
                let p = 2 * *n as i32;
                Ok(grid.xi().iter().map(|&xi| 2.0 * s_tilde * (q_over_k * xi).powi(p)).collect())
            }
            PotentialSpec::Custom { samples } => {
                if samples.len() != grid.len() {
                    return Err(Error::Shape(format!(
                        "custom potential has {} samples, grid has {}",
                        samples.len(),
                        grid.len()
                    )));
                }
                Ok(samples.clone())
            }
        }
    }

    /// Predicted stationary packet width δξ0 (unit prefactor), used by the
    /// resolution guard. `None` for custom potentials.
    pub fn stationary_width_estimate(&self) -> Option<f64> {
        match self {
            PotentialSpec::QuadraticImaginary { s } | PotentialSpec::SinusoidalImaginary { s } => {
                Some(2f64.powf(0.25) * s.powf(-0.25))
            }
            PotentialSpec::PowerLaw { n, q_over_k, s_tilde } => {
                // contraction/spreading balance: δξ0 = (2 s̃ q̂^{2n})^{-1/(2n+2)}
                let nn = *n as f64;
                let a = 2.0 * s_tilde * q_over_k.powf(2.0 * nn);
                Some(a.powf(-1.0 / (2.0 * nn + 2.0)))
            }
            PotentialSpec::Custom { .. } => None,
        }
    }
}

/// Rejects grids too coarse to resolve the stationary packet: the
/// contracting packet must stay at least 8 points wide.
pub fn resolution_guard(spec: &PotentialSpec, grid: &Grid) -> Result<()> {
    if let Some(width) = spec.stationary_width_estimate() {
        let min_width = 8.0 * grid.dxi();
        if width < min_width {
            return Err(Error::Config(format!(
                "grid too coarse: stationary width {width:.4} < 8 dxi = {min_width:.4}; \
                 increase points_per_period"
            )));
        }
    }
    Ok(())
}
