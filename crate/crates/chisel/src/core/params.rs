use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical constants of the experiment, in laboratory units.
///
/// The Rabi frequency is quoted in units of the linewidth, everything
/// else in SI. Only ratios enter the dimensionless dynamics; `gamma`,
/// `wavenumber` and `velocity` are needed to map interaction lengths
/// and transverse velocities onto grid quantities.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Ω0 in units of Γ.
    pub omega0_over_gamma: f64,
    /// Excited-state linewidth Γ in rad/s.
    pub gamma: f64,
    /// Recoil frequency ω_r = k²/(2M) in rad/s.
    pub recoil_frequency: f64,
    /// Optical wavenumber k in 1/m.
    pub wavenumber: f64,
    /// Longitudinal beam velocity in m/s.
    pub velocity: f64,
    /// Longitudinal velocity spread (FWHM) in m/s.
    pub dv_longitudinal: f64,
    /// Transverse velocity spread (FWHM) in m/s.
    pub dv_transverse: f64,
}

impl PhysicalParams {
    /// Validates positivity and the separation of scales; returns
    /// warnings for soft violations.
    pub fn validate(&self) -> Result<Vec<String>> {
        if self.omega0_over_gamma <= 0.0 || self.omega0_over_gamma.is_nan() {
            return Err(Error::Parameter(format!(
                "omega0_over_gamma must be > 0, got {}",
                self.omega0_over_gamma
            )));
        }
        if self.gamma <= 0.0 || self.gamma.is_nan() {
            return Err(Error::Parameter(format!("gamma must be > 0, got {}", self.gamma)));
        }
        if self.recoil_frequency <= 0.0 || self.recoil_frequency.is_nan() {
            return Err(Error::Parameter(format!(
                "recoil_frequency must be > 0, got {}",
                self.recoil_frequency
            )));
        }
        if self.velocity <= 0.0 || self.velocity.is_nan() {
            return Err(Error::Parameter(format!(
                "velocity must be > 0, got {}",
                self.velocity
            )));
        }
        if self.dv_longitudinal < 0.0 || self.dv_transverse < 0.0 {
            return Err(Error::Parameter("velocity spreads must be >= 0".into()));
        }
        let mut warnings = Vec::new();
        let ratio = self.recoil_frequency / self.gamma;
        if ratio > 0.1 {
            warnings.push(format!(
                "omega_r/gamma = {ratio:.3} exceeds 0.1; the eliminated two-level model assumes omega_r << gamma"
            ));
        }
        Ok(warnings)
    }

    /// ω_r/Γ.
    pub fn omega_r_over_gamma(&self) -> f64 {
        self.recoil_frequency / self.gamma
    }

    /// Maps an interaction length Δz (in μm) to dimensionless time
    /// τ = ω_r Δz / v for a given longitudinal velocity.
    pub fn tau_of_dz_um_at(&self, dz_um: f64, v: f64) -> f64 {
        self.recoil_frequency * dz_um * 1e-6 / v
    }

    /// Same with the nominal beam velocity.
    pub fn tau_of_dz_um(&self, dz_um: f64) -> f64 {
        self.tau_of_dz_um_at(dz_um, self.velocity)
    }

    /// Quasimomentum offset κ_t = M v_t / k = v_t k / (2 ω_r) carried by a
    /// transverse velocity v_t, in units of the optical wavenumber.
    pub fn kappa_t_of_vt(&self, vt: f64) -> f64 {
        vt * self.wavenumber / (2.0 * self.recoil_frequency)
    }
}

/// The single coupling the dynamics depends on once lengths are measured
/// in 1/k and times in 1/ω_r.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessParams {
    /// Absorption strength s = Ω0² / (2 ω_r Γ).
    pub s: f64,
    /// Trap-analog frequency ω0/ω_r = 2√s.
    pub omega0_bar: f64,
}

impl DimensionlessParams {
    pub fn from_s(s: f64) -> Result<Self> {
        if s <= 0.0 || !s.is_finite() {
            return Err(Error::Parameter(format!("s must be > 0 and finite, got {s}")));
        }
        Ok(DimensionlessParams { s, omega0_bar: 2.0 * s.sqrt() })
    }
}

/// Reduces the physical constants to the dimensionless coupling
/// s = Ω0² / (2 ω_r Γ), with Ω0 expressed in rad/s.
pub fn reduce_params(p: &PhysicalParams) -> Result<DimensionlessParams> {
    p.validate()?;
    let omega0 = p.omega0_over_gamma * p.gamma;
    let s = omega0 * omega0 / (2.0 * p.recoil_frequency * p.gamma);
    DimensionlessParams::from_s(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argonish(omega0_over_gamma: f64, omega_r_over_gamma: f64) -> PhysicalParams {
        let gamma = 1.0e7;
        PhysicalParams {
            omega0_over_gamma,
            gamma,
            recoil_frequency: omega_r_over_gamma * gamma,
            wavenumber: 7.84e6,
            velocity: 50.0,
            dv_longitudinal: 0.0,
            dv_transverse: 0.0,
        }
    }

    #[test]
    fn reduce_matches_definition() {
        // omega0 = 0.4 Γ, omega_r/Γ = 1e-3 -> s = 0.16 / (2e-3) = 80
        let p = argonish(0.4, 1e-3);
        let d = reduce_params(&p).unwrap();
        assert!((d.s - 80.0).abs() < 1e-10 * 80.0);
        assert!((d.omega0_bar - 2.0 * 80f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn zero_coupling_rejected() {
        let p = argonish(0.0, 1e-3);
        assert!(matches!(reduce_params(&p), Err(Error::Parameter(_))));
    }

    #[test]
    fn omega0_bar_identity() {
        let d = DimensionlessParams::from_s(2.0).unwrap();
        assert!((d.omega0_bar - 2.0 * 2f64.sqrt()).abs() < 1e-14);
        assert!((d.omega0_bar - 2.8284271247461903).abs() < 1e-12);
    }

    #[test]
    fn scale_consistency() {
        // s is a pure number: rescaling every rate (Ω0, Γ, ω_r) by the
        // same factor leaves it unchanged, for a ∈ {2, 10}
        let base = argonish(0.4, 1e-3);
        let s0 = reduce_params(&base).unwrap().s;
        for a in [2.0, 10.0] {
            let scaled = PhysicalParams {
                gamma: base.gamma * a,
                recoil_frequency: base.recoil_frequency * a,
                ..base.clone()
            };
            let s = reduce_params(&scaled).unwrap().s;
            assert!(((s - s0) / s0).abs() < 1e-12, "a={a}: s={s} expected {s0}");
        }
        // while scaling the coupling alone goes quadratically
        let doubled = argonish(0.8, 1e-3);
        let s2 = reduce_params(&doubled).unwrap().s;
        assert!(((s2 - 4.0 * s0) / (4.0 * s0)).abs() < 1e-12);
    }

    #[test]
    fn warns_when_recoil_not_small() {
        let p = argonish(0.4, 0.2);
        let warnings = p.validate().unwrap();
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn tau_and_kappa_mappings() {
        let p = argonish(0.4, 1e-3);
        // τ = ω_r Δz / v
        let tau = p.tau_of_dz_um(500.0);
        assert!((tau - 1.0e4 * 500.0e-6 / 50.0).abs() < 1e-15);
        // doubling v halves τ
        assert!((p.tau_of_dz_um_at(500.0, 100.0) - tau / 2.0).abs() < 1e-15);
        // κ_t = v_t k / (2 ω_r)
        let kt = p.kappa_t_of_vt(0.007);
        assert!((kt - 0.007 * 7.84e6 / (2.0 * 1.0e4)).abs() < 1e-12);
    }
}
