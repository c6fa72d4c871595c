use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Periodic spatial lattice in ξ = kx together with its conjugate
/// momentum comb.
///
/// The domain spans `periods` standing-wave periods of dimensionless
/// length π each, centred on a potential node: ξ ∈ [−Pπ/2, Pπ/2).
/// Momenta are stored in FFT bin order with spacing 2/P, so diffraction
/// orders κ = 2n land exactly on comb points.
#[derive(Clone)]
pub struct Grid {
    periods: usize,
    points_per_period: usize,
    xi: Vec<f64>,
    kappa: Vec<f64>,
    dxi: f64,
    fft_fwd: Arc<dyn Fft<f64>>,
    fft_inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("periods", &self.periods)
            .field("points_per_period", &self.points_per_period)
            .field("dxi", &self.dxi)
            .finish()
    }
}

/// Builds a grid of `periods` × `points_per_period` points; the total
/// must be a power of two.
pub fn make_grid(periods: usize, points_per_period: usize) -> Result<Grid> {
    if periods < 1 {
        return Err(Error::Config("periods must be >= 1".into()));
    }
    if points_per_period < 8 {
        return Err(Error::Config(format!(
            "points_per_period must be >= 8, got {points_per_period}"
        )));
    }
    let total = periods * points_per_period;
    if !total.is_power_of_two() {
        return Err(Error::Config(format!(
            "total point count {total} = {periods} x {points_per_period} is not a power of two"
        )));
    }
    let dxi = std::f64::consts::PI / points_per_period as f64;
    let half_len = periods as f64 * std::f64::consts::PI / 2.0;
    let xi: Vec<f64> = (0..total).map(|j| -half_len + j as f64 * dxi).collect();
    let dk = 2.0 / periods as f64;
    let kappa: Vec<f64> = (0..total)
        .map(|m| {
            let signed = if m <= total / 2 { m as isize } else { m as isize - total as isize };
            signed as f64 * dk
        })
        .collect();
    let mut planner = FftPlanner::new();
    let fft_fwd = planner.plan_fft_forward(total);
    let fft_inv = planner.plan_fft_inverse(total);
    Ok(Grid { periods, points_per_period, xi, kappa, dxi, fft_fwd, fft_inv })
}

impl Grid {
    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn periods(&self) -> usize {
        self.periods
    }

    pub fn points_per_period(&self) -> usize {
        self.points_per_period
    }

    /// Sample positions ξ_j.
    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    /// Momentum comb in FFT bin order (κ_0 = 0, positive branch, then
    /// negative branch).
    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    pub fn dxi(&self) -> f64 {
        self.dxi
    }

    /// Domain length Pπ.
    pub fn length(&self) -> f64 {
        self.periods as f64 * std::f64::consts::PI
    }

    /// Momentum comb spacing 2/P.
    pub fn kappa_spacing(&self) -> f64 {
        2.0 / self.periods as f64
    }

    /// Largest resolvable |κ|.
    pub fn kappa_max(&self) -> f64 {
        self.points_per_period as f64
    }

    /// FFT bin holding diffraction order n (κ = 2n). Orders at or beyond
    /// the Nyquist momentum are not resolvable.
    pub fn order_bin(&self, n: i32) -> Option<usize> {
        let total = self.len() as i64;
        let idx = n as i64 * self.periods as i64;
        if idx.abs() >= total / 2 {
            return None;
        }
        Some(idx.rem_euclid(total) as usize)
    }

    /// FFT bin for an arbitrary comb momentum κ0; `None` when κ0 does
    /// not lie on the comb (to within 1e-9 of a bin) or is not resolvable.
    pub fn comb_bin(&self, kappa0: f64) -> Option<usize> {
        let steps = kappa0 / self.kappa_spacing();
        let rounded = steps.round();
        if (steps - rounded).abs() > 1e-9 {
            return None;
        }
        let total = self.len() as i64;
        let idx = rounded as i64;
        if idx.abs() >= total / 2 {
            return None;
        }
        Some(idx.rem_euclid(total) as usize)
    }

    /// In-place unnormalized forward DFT.
    pub fn forward(&self, buf: &mut [Complex64]) {
        self.fft_fwd.process(buf);
    }

    /// In-place inverse DFT scaled by 1/N, so `forward` then `inverse`
    /// is the identity.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.fft_inv.process(buf);
        let scale = 1.0 / self.len() as f64;
        for a in buf.iter_mut() {
            *a *= scale;
        }
    }

    /// Discretized L² norm dξ Σ|a|².
    pub fn norm(&self, amplitudes: &[Complex64]) -> f64 {
        self.dxi * amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>()
    }

    /// Discretized inner product dξ Σ conj(a)·b.
    pub fn inner(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        self.dxi * a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>()
    }
}
