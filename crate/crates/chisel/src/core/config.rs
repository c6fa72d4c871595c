use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::core::grid::{make_grid, Grid};
use crate::core::params::{DimensionlessParams, PhysicalParams};
use crate::core::state::InitialKind;
use crate::error::{Error, Result};

/// JSON configuration consumed by the CLI.
///
/// Either `s` directly or the pair (`omega0_over_gamma`,
/// `omega_r_over_gamma`) must be present. Real-unit fields (`gamma`,
/// `wavenumber`, `velocity`) are only needed by pipelines that map
/// interaction lengths or transverse velocities.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimConfig {
    #[serde(default)]
    pub omega0_over_gamma: Option<f64>,
    #[serde(default)]
    pub omega_r_over_gamma: Option<f64>,
    #[serde(default)]
    pub s: Option<f64>,
    /// Linewidth Γ in rad/s.
    #[serde(default)]
    pub gamma: Option<f64>,
    /// Optical wavenumber in 1/m.
    #[serde(default)]
    pub wavenumber: Option<f64>,
    /// Beam velocity in m/s.
    #[serde(default)]
    pub velocity: Option<f64>,
    pub periods: usize,
    pub points_per_period: usize,
    pub initial: InitialConfig,
    #[serde(default)]
    pub evolve: Option<EvolveSection>,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub velocity_spreads: Option<VelocitySection>,
    #[serde(default)]
    pub probe: Option<ProbeSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InitialConfig {
    pub kind: String,
    #[serde(default)]
    pub kappa0: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvolveSection {
    /// Time step; chosen automatically from the stability guards when absent.
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub tau_final: Option<f64>,
    #[serde(default = "default_stride")]
    pub observer_stride: usize,
}

fn default_stride() -> usize {
    50
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSection {
    /// Interaction lengths in μm, strictly increasing.
    pub dz_um: Vec<f64>,
    #[serde(default = "default_orders")]
    pub orders: i32,
    #[serde(default)]
    pub raman_nath: bool,
}

fn default_orders() -> i32 {
    3
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VelocitySection {
    /// Longitudinal spread (FWHM), m/s.
    pub dv_l: f64,
    /// Transverse spread (FWHM), m/s.
    pub dv_t: f64,
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeSection {
    /// Complex modulation depth of the thin probe grating.
    pub eta_re: f64,
    pub eta_im: f64,
    #[serde(default = "default_order")]
    pub order: i32,
    #[serde(default = "default_phi_steps")]
    pub phi_steps: usize,
}

fn default_order() -> i32 {
    3
}

fn default_phi_steps() -> usize {
    64
}

impl SimConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: SimConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("invalid config {}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.s.is_none() && (self.omega0_over_gamma.is_none() || self.omega_r_over_gamma.is_none()) {
            return Err(Error::Config(
                "config must provide either `s` or both `omega0_over_gamma` and `omega_r_over_gamma`".into(),
            ));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.dz_um.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::Config("sweep.dz_um must be strictly increasing".into()));
            }
        }
        if let Some(v) = &self.velocity_spreads {
            if v.samples < 1 {
                return Err(Error::Config("velocity_spreads.samples must be >= 1".into()));
            }
        }
        if let Some(p) = &self.probe {
            if p.eta_im < 0.0 {
                return Err(Error::Config(
                    "probe.eta_im must be >= 0 so the probe never amplifies".into(),
                ));
            }
        }
        Ok(())
    }

    /// Dimensionless coupling, from `s` or from the ratio pair.
    pub fn dimensionless(&self) -> Result<DimensionlessParams> {
        if let Some(s) = self.s {
            return DimensionlessParams::from_s(s);
        }
        let q = self.omega0_over_gamma.unwrap();
        let r = self.omega_r_over_gamma.unwrap();
        if q <= 0.0 || r <= 0.0 || q.is_nan() || r.is_nan() {
            return Err(Error::Parameter(format!(
                "omega0_over_gamma and omega_r_over_gamma must be > 0, got {q}, {r}"
            )));
        }
        DimensionlessParams::from_s(q * q / (2.0 * r))
    }

    /// Full physical parameter set; errors when real-unit fields are missing.
    pub fn physical(&self) -> Result<PhysicalParams> {
        let gamma = self
            .gamma
            .ok_or_else(|| Error::Config("config key `gamma` (rad/s) required for this pipeline".into()))?;
        let omega_r_over_gamma = self
            .omega_r_over_gamma
            .ok_or_else(|| Error::Config("config key `omega_r_over_gamma` required for this pipeline".into()))?;
        let omega0_over_gamma = self
            .omega0_over_gamma
            .ok_or_else(|| Error::Config("config key `omega0_over_gamma` required for this pipeline".into()))?;
        let p = PhysicalParams {
            omega0_over_gamma,
            gamma,
            recoil_frequency: omega_r_over_gamma * gamma,
            wavenumber: self
                .wavenumber
                .ok_or_else(|| Error::Config("config key `wavenumber` (1/m) required for this pipeline".into()))?,
            velocity: self
                .velocity
                .ok_or_else(|| Error::Config("config key `velocity` (m/s) required for this pipeline".into()))?,
            dv_longitudinal: self.velocity_spreads.as_ref().map_or(0.0, |v| v.dv_l),
            dv_transverse: self.velocity_spreads.as_ref().map_or(0.0, |v| v.dv_t),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn grid(&self) -> Result<Grid> {
        make_grid(self.periods, self.points_per_period)
    }

    pub fn initial_kind(&self) -> Result<InitialKind> {
        match self.initial.kind.as_str() {
            "uniform" => Ok(InitialKind::Uniform),
            "plane_wave" => Ok(InitialKind::PlaneWave { kappa0: self.initial.kappa0.unwrap_or(0.0) }),
            other => Err(Error::Config(format!(
                "unknown initial.kind `{other}` (expected `uniform` or `plane_wave`)"
            ))),
        }
    }
}
