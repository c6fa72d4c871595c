//! Momentum spectra, diffraction orders, the thin-probe interferometer
//! and fringe-phase extraction.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::core::{Grid, WaveState};
use crate::error::{Error, Result};
use crate::exec;
use crate::propagator;

/// Unitary momentum-space representation of a state.
///
/// Amplitudes are scaled so that Σ|ã_m|² equals the position-space norm
/// (Parseval); phases follow the continuum convention
/// ã(κ) ∝ ∫ φ(ξ) e^{−iκξ} dξ over the centred domain.
#[derive(Debug, Clone)]
pub struct MomentumSpectrum {
    /// Comb in FFT bin order.
    pub kappa: Vec<f64>,
    pub amplitudes: Vec<Complex64>,
    /// rms width of |ã|² about its mean momentum.
    pub rms_width: f64,
}

pub fn momentum_spectrum(grid: &Grid, state: &WaveState) -> MomentumSpectrum {
    let total = grid.len() as f64;
    let mut buf = state.amplitudes.clone();
    grid.forward(&mut buf);
    let scale = (grid.dxi() / total).sqrt();
    let xi0 = grid.xi()[0];
    for (a, &k) in buf.iter_mut().zip(grid.kappa()) {
        // restore the centred-domain phase: FFT sums over j with ξ_j = ξ_0 + j dξ
        *a *= scale * Complex64::new(0.0, -k * xi0).exp();
    }
    let weight: f64 = buf.iter().map(|a| a.norm_sqr()).sum();
    let var = if weight > 0.0 {
        let mean = buf.iter().zip(grid.kappa()).map(|(a, &k)| a.norm_sqr() * k).sum::<f64>() / weight;
        buf.iter()
            .zip(grid.kappa())
            .map(|(a, &k)| a.norm_sqr() * (k - mean) * (k - mean))
            .sum::<f64>()
            / weight
    } else {
        0.0
    };
    MomentumSpectrum { kappa: grid.kappa().to_vec(), amplitudes: buf, rms_width: var.sqrt() }
}

/// Efficiency normalization mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// η_n = |a_n|² relative to the initial norm; sums to at most the
    /// survival probability.
    Raw,
    /// Divided by the total over the reported orders (the surviving flux
    /// for whole-period states); sums to exactly 1.
    Normalized,
}

/// Diffraction-order amplitudes and efficiencies.
#[derive(Debug, Clone)]
pub struct DiffractionTable {
    /// Orders n ∈ [−n_max, n_max].
    pub orders: Vec<i32>,
    /// Complex amplitudes at κ = 2n.
    pub amplitudes: Vec<Complex64>,
    pub efficiencies: Vec<f64>,
    pub normalization: Normalization,
    /// Fraction of the norm found off the order comb; nonzero quasimomentum
    /// or broken periodicity shows up here.
    pub off_comb_fraction: f64,
}

impl DiffractionTable {
    pub fn amplitude(&self, n: i32) -> Option<Complex64> {
        let n_max = (self.orders.len() as i32 - 1) / 2;
        if n.abs() > n_max {
            return None;
        }
        Some(self.amplitudes[(n + n_max) as usize])
    }

    pub fn efficiency(&self, n: i32) -> Option<f64> {
        let n_max = (self.orders.len() as i32 - 1) / 2;
        if n.abs() > n_max {
            return None;
        }
        Some(self.efficiencies[(n + n_max) as usize])
    }
}

/// Reads order amplitudes off the exact comb bins κ = 2n.
pub fn diffraction_amplitudes(
    grid: &Grid,
    state: &WaveState,
    n_max: i32,
    normalization: Normalization,
) -> Result<DiffractionTable> {
    if n_max < 0 || grid.order_bin(n_max).is_none() {
        return Err(Error::Config(format!("order cutoff {n_max} not resolvable on this grid")));
    }
    let spec = momentum_spectrum(grid, state);
    let total_weight: f64 = spec.amplitudes.iter().map(|a| a.norm_sqr()).sum();
    let comb_weight: f64 = spec
        .amplitudes
        .iter()
        .enumerate()
        .filter(|(m, _)| m % grid.periods() == 0)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    let off_comb_fraction = if total_weight > 0.0 { 1.0 - comb_weight / total_weight } else { 0.0 };

    let orders: Vec<i32> = (-n_max..=n_max).collect();
    let amplitudes: Vec<Complex64> = orders
        .iter()
        .map(|&n| spec.amplitudes[grid.order_bin(n).unwrap()])
        .collect();
    let raw: Vec<f64> = amplitudes.iter().map(|a| a.norm_sqr()).collect();
    let efficiencies = match normalization {
        Normalization::Raw => raw,
        Normalization::Normalized => {
            let sum: f64 = raw.iter().sum();
            if sum <= 0.0 {
                return Err(Error::Data("cannot normalize: no flux in the reported orders".into()));
            }
            raw.iter().map(|x| x / sum).collect()
        }
    };
    Ok(DiffractionTable { orders, amplitudes, efficiencies, normalization, off_comb_fraction })
}

/// Efficiencies by integrating the spectrum over full momentum windows
/// [2n−1, 2n+1) around each order — the detector-window reading, needed
/// once a quasimomentum offset moves flux off the comb.
pub fn windowed_efficiencies(grid: &Grid, state: &WaveState, n_max: i32) -> Vec<f64> {
    let spec = momentum_spectrum(grid, state);
    let mut eta = vec![0.0; (2 * n_max + 1) as usize];
    for (a, &k) in spec.amplitudes.iter().zip(&spec.kappa) {
        let n = ((k + 1.0) / 2.0).floor() as i32;
        if n.abs() <= n_max {
            eta[(n + n_max) as usize] += a.norm_sqr();
        }
    }
    eta
}

/// Thin probe grating: transmission t(ξ) = exp(i η_c (1 + cos(2ξ − φ_s))).
///
/// The constant offset keeps |t| ≤ 1 for Im η_c ≥ 0 (absorption never
/// amplifies); it only contributes a global factor and drops out of every
/// fringe phase.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ProbeSpec {
    /// Complex modulation depth η_c.
    pub eta_re: f64,
    pub eta_im: f64,
    /// Spatial phase of the probe standing wave, radians.
    pub phi_s: f64,
    /// Coupling-order bookkeeping window for `transmission_coefficients`.
    pub order_cutoff: usize,
}

impl ProbeSpec {
    pub fn new(eta: Complex64, phi_s: f64) -> Result<Self> {
        if eta.im < 0.0 {
            return Err(Error::Parameter(format!(
                "Im(eta) must be >= 0 so the probe never amplifies, got {}",
                eta.im
            )));
        }
        Ok(ProbeSpec { eta_re: eta.re, eta_im: eta.im, phi_s, order_cutoff: 8 })
    }

    pub fn eta(&self) -> Complex64 {
        Complex64::new(self.eta_re, self.eta_im)
    }

    /// Fourier coefficients g_j of the transmission in e^{ij(2ξ−φ_s)},
    /// |j| ≤ order_cutoff, by periodic quadrature.
    pub fn transmission_coefficients(&self) -> Vec<(i32, Complex64)> {
        let m = 2048;
        let eta = self.eta();
        let t: Vec<Complex64> = (0..m)
            .map(|k| {
                let u = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
                (Complex64::i() * eta * (1.0 + u.cos())).exp()
            })
            .collect();
        let jmax = self.order_cutoff as i32;
        (-jmax..=jmax)
            .map(|j| {
                let mut sum = Complex64::new(0.0, 0.0);
                for (k, tv) in t.iter().enumerate() {
                    let u = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
                    sum += tv * Complex64::new(0.0, -j as f64 * u).exp();
                }
                (j, sum / m as f64)
            })
            .collect()
    }
}

/// Pointwise thin-grating multiplication; no propagation during the probe.
pub fn apply_probe(grid: &Grid, state: &WaveState, probe: &ProbeSpec) -> Result<WaveState> {
    if probe.eta_im < 0.0 {
        return Err(Error::Parameter("Im(eta) must be >= 0".into()));
    }
    let eta = probe.eta();
    let norm_before = grid.norm(&state.amplitudes);
    let amplitudes: Vec<Complex64> = state
        .amplitudes
        .iter()
        .zip(grid.xi())
        .map(|(a, &xi)| {
            let t = (Complex64::i() * eta * (1.0 + (2.0 * xi - probe.phi_s).cos())).exp();
            a * t
        })
        .collect();
    let norm_after = grid.norm(&amplitudes);
    let ratio = if norm_before > 0.0 { norm_after / norm_before } else { 0.0 };
    Ok(WaveState { amplitudes, tau: state.tau, survival: state.survival * ratio })
}

/// Raw intensity in one output order as a function of the probe phase.
#[derive(Debug, Clone)]
pub struct Fringe {
    pub phi_s: Vec<f64>,
    pub intensity: Vec<f64>,
    pub order: i32,
}

/// Least-squares fit of I = A + B cos(φ_s − θ).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FringeFit {
    pub offset: f64,
    pub amplitude: f64,
    /// Phase in (−π, π].
    pub theta: f64,
    pub sigma_theta: f64,
}

/// Scans the probe phase and records the raw order-`order` efficiency.
pub fn fringe_scan(
    grid: &Grid,
    state: &WaveState,
    eta: Complex64,
    order: i32,
    phi_s: &[f64],
    parallel: bool,
) -> Result<Fringe> {
    validate_phi_list(phi_s)?;
    let eval = |phi: &f64| -> Result<f64> {
        let probe = ProbeSpec::new(eta, *phi)?;
        let probed = apply_probe(grid, state, &probe)?;
        let table = diffraction_amplitudes(grid, &probed, order.abs(), Normalization::Raw)?;
        Ok(table.efficiency(order).unwrap())
    };
    let results: Vec<Result<f64>> = if parallel {
        exec::map_collect(phi_s, eval)
    } else {
        exec::map_collect_seq(phi_s, eval)
    };
    let intensity = results.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(Fringe { phi_s: phi_s.to_vec(), intensity, order })
}

fn validate_phi_list(phi_s: &[f64]) -> Result<()> {
    if phi_s.len() < 8 {
        return Err(Error::Config(format!(
            "fringe scan needs at least 8 probe phases, got {}",
            phi_s.len()
        )));
    }
    let (min, max) = phi_s
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let span = max - min;
    let full = 2.0 * std::f64::consts::PI;
    if span < full * (1.0 - 2.0 / phi_s.len() as f64) - 1e-9 {
        return Err(Error::Config(format!(
            "fringe scan must cover a full 2π period, got span {span:.3}"
        )));
    }
    Ok(())
}

/// Uniform scan grid of `n` phases over [0, 2π).
pub fn phi_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| 2.0 * std::f64::consts::PI * k as f64 / n as f64).collect()
}

/// Linear least squares on the regressors (1, cos φ_s, sin φ_s).
pub fn fit_fringe_phase(fringe: &Fringe) -> Result<FringeFit> {
    validate_phi_list(&fringe.phi_s)?;
    let m = fringe.phi_s.len();
    // normal equations for X = [1, cos, sin]
    let mut xtx = [[0.0f64; 3]; 3];
    let mut xty = [0.0f64; 3];
    for (&phi, &y) in fringe.phi_s.iter().zip(&fringe.intensity) {
        let row = [1.0, phi.cos(), phi.sin()];
        for i in 0..3 {
            for j in 0..3 {
                xtx[i][j] += row[i] * row[j];
            }
            xty[i] += row[i] * y;
        }
    }
    let inv = invert3(&xtx).ok_or_else(|| Error::Data("singular fringe design matrix".into()))?;
    let mut coef = [0.0f64; 3];
    for i in 0..3 {
        for j in 0..3 {
            coef[i] += inv[i][j] * xty[j];
        }
    }
    let (a0, ac, as_) = (coef[0], coef[1], coef[2]);
    let rss: f64 = fringe
        .phi_s
        .iter()
        .zip(&fringe.intensity)
        .map(|(&phi, &y)| {
            let r = y - (a0 + ac * phi.cos() + as_ * phi.sin());
            r * r
        })
        .sum();
    let dof = (m as f64 - 3.0).max(1.0);
    let sigma2 = rss / dof;
    let amplitude = (ac * ac + as_ * as_).sqrt();
    // covariance of (ac, as): sigma2 * inv[1..3][1..3]
    let c_cc = sigma2 * inv[1][1];
    let c_cs = sigma2 * inv[1][2];
    let c_ss = sigma2 * inv[2][2];
    let b2 = amplitude * amplitude;
    let sigma_b = if amplitude > 0.0 {
        ((ac * ac * c_cc + 2.0 * ac * as_ * c_cs + as_ * as_ * c_ss) / b2).max(0.0).sqrt()
    } else {
        (c_cc.max(c_ss)).max(0.0).sqrt()
    };
    let floor = 1e-12 * (a0.abs() + 1.0);
    if amplitude <= 3.0 * sigma_b + floor {
        return Err(Error::NoFringe(format!(
            "fringe amplitude {amplitude:.3e} indistinguishable from zero (3σ_B = {:.3e})",
            3.0 * sigma_b
        )));
    }
    let sigma_theta = if b2 > 0.0 {
        ((as_ * as_ * c_cc - 2.0 * ac * as_ * c_cs + ac * ac * c_ss) / (b2 * b2)).max(0.0).sqrt()
    } else {
        f64::INFINITY
    };
    let mut theta = as_.atan2(ac);
    if theta <= -std::f64::consts::PI {
        theta += 2.0 * std::f64::consts::PI;
    }
    Ok(FringeFit { offset: a0, amplitude, theta, sigma_theta })
}

fn invert3(m: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if det.abs() < 1e-300 {
        return None;
    }
    let inv_det = 1.0 / det;
    let mut out = [[0.0f64; 3]; 3];
    out[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) * inv_det;
    out[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * inv_det;
    out[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * inv_det;
    out[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) * inv_det;
    out[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * inv_det;
    out[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * inv_det;
    out[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) * inv_det;
    out[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * inv_det;
    out[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * inv_det;
    Some(out)
}

/// Outcome of the two-length phase-difference protocol.
#[derive(Debug, Clone)]
pub struct ProtocolResult {
    /// |θ_long − θ_ref| wrapped into [0, π]; asymptotically 3|φ2| at order 3.
    pub delta_phase_abs: f64,
    pub fit_long: FringeFit,
    pub fit_ref: FringeFit,
    pub fringe_long: Fringe,
    pub fringe_ref: Fringe,
}

/// Fringe-phase difference between two prepared states; the probe's
/// offset phase cancels in the subtraction.
pub fn phase_protocol_states(
    grid: &Grid,
    state_long: &WaveState,
    state_ref: &WaveState,
    eta: Complex64,
    order: i32,
    n_phi: usize,
    parallel: bool,
) -> Result<ProtocolResult> {
    let phis = phi_grid(n_phi);
    let fringe_long = fringe_scan(grid, state_long, eta, order, &phis, parallel)?;
    let fringe_ref = fringe_scan(grid, state_ref, eta, order, &phis, parallel)?;
    let fit_long = fit_fringe_phase(&fringe_long)?;
    let fit_ref = fit_fringe_phase(&fringe_ref)?;
    let mut d = fit_long.theta - fit_ref.theta;
    while d > std::f64::consts::PI {
        d -= 2.0 * std::f64::consts::PI;
    }
    while d <= -std::f64::consts::PI {
        d += 2.0 * std::f64::consts::PI;
    }
    Ok(ProtocolResult { delta_phase_abs: d.abs(), fit_long, fit_ref, fringe_long, fringe_ref })
}

/// Full protocol: evolve the initial state to two interaction times,
/// scan the probe against both, subtract the fitted phases.
#[allow(clippy::too_many_arguments)]
pub fn phase_protocol(
    grid: &Grid,
    initial: &WaveState,
    v: &[f64],
    dt: f64,
    tau_long: f64,
    tau_ref: f64,
    eta: Complex64,
    order: i32,
    n_phi: usize,
    parallel: bool,
) -> Result<ProtocolResult> {
    let k_long = (tau_long / dt).round() as usize;
    let k_ref = (tau_ref / dt).round() as usize;
    let mut steps = vec![k_ref, k_long];
    steps.sort_unstable();
    steps.dedup();
    let snaps = propagator::evolve_with_snapshots(grid, initial, v, dt, &steps, false)?;
    let state_at = |k: usize| -> &WaveState {
        let idx = steps.iter().position(|&s| s == k).unwrap();
        &snaps[idx]
    };
    phase_protocol_states(grid, state_at(k_long), state_at(k_ref), eta, order, n_phi, parallel)
}
