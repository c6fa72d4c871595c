//! Monte-Carlo averaging over the beam's velocity distributions. The
//! longitudinal draw rescales the interaction time, the transverse draw
//! sets an initial quasimomentum offset; intensities, never amplitudes,
//! are averaged.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::core::PhysicalParams;
use crate::error::Result;
use crate::exec;

/// Settings for the velocity Monte Carlo. Spreads are full widths at
/// half maximum of Gaussian distributions (the customary beam spec).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct VelocityAveraging {
    pub samples: usize,
    /// Longitudinal FWHM, m/s.
    pub dv_l: f64,
    /// Transverse FWHM, m/s.
    pub dv_t: f64,
    pub seed: u64,
}

impl VelocityAveraging {
    /// Degenerate distribution: a single sample at the nominal velocity.
    pub fn none() -> Self {
        VelocityAveraging { samples: 1, dv_l: 0.0, dv_t: 0.0, seed: 0 }
    }
}

/// One velocity class.
#[derive(Debug, Clone, Copy)]
pub struct VelocityDraw {
    /// Longitudinal velocity, m/s.
    pub v_l: f64,
    /// Quasimomentum offset in units of k, wrapped into (−1, 1].
    pub kappa_t: f64,
    /// Set when the raw κ_t fell outside the first Brillouin zone.
    pub wrapped: bool,
}

const FWHM_TO_SIGMA: f64 = 0.42466090014400953; // 1 / (2 sqrt(2 ln 2))

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; u1 in (0, 1] avoids ln(0)
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Wraps κ into the first Brillouin zone (−1, 1].
pub fn wrap_quasimomentum(kappa: f64) -> (f64, bool) {
    if kappa > 1.0 || kappa <= -1.0 {
        let mut k = (kappa + 1.0).rem_euclid(2.0) - 1.0;
        if k <= -1.0 {
            k += 2.0;
        }
        (k, true)
    } else {
        (kappa, false)
    }
}

/// Seeded draws; with zero spreads every draw is exactly the nominal
/// velocity class, so averaging degenerates to the plain pipeline.
pub fn velocity_draws(phys: &PhysicalParams, cfg: &VelocityAveraging) -> Vec<VelocityDraw> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let sigma_l = cfg.dv_l * FWHM_TO_SIGMA;
    let sigma_t = cfg.dv_t * FWHM_TO_SIGMA;
    (0..cfg.samples.max(1))
        .map(|_| {
            let mut v_l = phys.velocity;
            if sigma_l > 0.0 {
                loop {
                    v_l = phys.velocity + sigma_l * gaussian(&mut rng);
                    if v_l > 0.0 {
                        break;
                    }
                }
            }
            let vt = if sigma_t > 0.0 { sigma_t * gaussian(&mut rng) } else { 0.0 };
            let (kappa_t, wrapped) = wrap_quasimomentum(phys.kappa_t_of_vt(vt));
            VelocityDraw { v_l, kappa_t, wrapped }
        })
        .collect()
}

/// Evaluates an intensity-valued observable per velocity class and
/// averages elementwise, in draw order regardless of scheduling.
pub fn velocity_average<F>(draws: &[VelocityDraw], eval: F, parallel: bool) -> Result<Vec<f64>>
where
    F: Fn(&VelocityDraw) -> Result<Vec<f64>> + Sync + Send,
{
    let results: Vec<Result<Vec<f64>>> = if parallel {
        exec::map_collect(draws, &eval)
    } else {
        exec::map_collect_seq(draws, &eval)
    };
    let mut acc: Option<Vec<f64>> = None;
    let mut count = 0usize;
    for r in results {
        let v = r?;
        match &mut acc {
            None => acc = Some(v),
            Some(a) => {
                for (x, y) in a.iter_mut().zip(&v) {
                    *x += y;
                }
            }
        }
        count += 1;
    }
    let mut out = acc.unwrap_or_default();
    let inv = 1.0 / count.max(1) as f64;
    for x in out.iter_mut() {
        *x *= inv;
    }
    Ok(out)
}
