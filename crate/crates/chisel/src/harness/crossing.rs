//! Characteristic-length estimator: the crossing point between linear
//! extrapolations of the initial decline and of the plateau of the
//! zeroth-order efficiency curve.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::sweep::EfficiencyCurve;

/// Fixed, documented segment boundaries: the decline line uses the
/// leading points before the signal has dropped through 60% of its total
/// fall; the plateau line uses the final 25% of points. The plateau must
/// be genuine: the final 20% of points may vary by less than 1%.
const FALL_FRACTION: f64 = 0.6;
const PLATEAU_POINTS_FRACTION: f64 = 0.25;
const PLATEAU_CHECK_FRACTION: f64 = 0.2;
const PLATEAU_FLATNESS: f64 = 0.01;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Z0Estimate {
    pub z0_um: f64,
    /// Slope/intercept of the decline line.
    pub decline: (f64, f64),
    /// Slope/intercept of the plateau line.
    pub plateau: (f64, f64),
}

fn line_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

/// Crossing abscissa for a generic decline-to-plateau curve.
pub fn crossing_abscissa(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 6 {
        return Err(Error::Range(format!(
            "crossing estimator needs >= 6 points, got {}",
            xs.len()
        )));
    }
    let n = xs.len();
    // plateau presence: final 20% of points vary by < 1%
    let check = ((n as f64 * PLATEAU_CHECK_FRACTION).ceil() as usize).max(2);
    let tail = &ys[n - check..];
    let (tmin, tmax) = tail.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &y| {
        (lo.min(y), hi.max(y))
    });
    let tmean = tail.iter().sum::<f64>() / tail.len() as f64;
    if tmean <= 0.0 || (tmax - tmin) / tmean >= PLATEAU_FLATNESS {
        return Err(Error::Range(format!(
            "no plateau detected (final {check} points vary by {:.2}%); extend the sweep range",
            100.0 * (tmax - tmin) / tmean.max(1e-300)
        )));
    }
    let fall = ys[0] - tmean;
    if fall <= 0.0 {
        return Err(Error::Range("curve does not decline; nothing to extrapolate".into()));
    }
    let threshold = ys[0] - FALL_FRACTION * fall;
    let mut decline_end = ys.iter().position(|&y| y < threshold).unwrap_or(n);
    decline_end = decline_end.clamp(2, n - 2);
    let plateau_start = n - ((n as f64 * PLATEAU_POINTS_FRACTION).ceil() as usize).max(2);
    let (ma, ba) = line_fit(&xs[..decline_end], &ys[..decline_end]);
    let (mb, bb) = line_fit(&xs[plateau_start..], &ys[plateau_start..]);
    if (ma - mb).abs() < 1e-300 {
        return Err(Error::Range("decline and plateau slopes coincide; no crossing".into()));
    }
    let x0 = (bb - ba) / (ma - mb);
    if !x0.is_finite() || x0 < xs[0] - (xs[n - 1] - xs[0]) || x0 > xs[n - 1] * 2.0 + 1.0 {
        return Err(Error::Range(format!("crossing at {x0:.3} lies outside a plausible range")));
    }
    Ok(x0)
}

/// z0 from the zeroth-order efficiency of a sweep curve.
pub fn extract_z0(curve: &EfficiencyCurve) -> Result<Z0Estimate> {
    let eta0 = curve
        .order_column(0)
        .ok_or_else(|| Error::Data("curve does not report order 0".into()))?;
    let z0_um = crossing_abscissa(&curve.dz_um, &eta0)?;
    // recompute the two lines for reporting
    let n = eta0.len();
    let check = ((n as f64 * PLATEAU_CHECK_FRACTION).ceil() as usize).max(2);
    let tmean = eta0[n - check..].iter().sum::<f64>() / check as f64;
    let threshold = eta0[0] - FALL_FRACTION * (eta0[0] - tmean);
    let decline_end = eta0.iter().position(|&y| y < threshold).unwrap_or(n).clamp(2, n - 2);
    let plateau_start = n - ((n as f64 * PLATEAU_POINTS_FRACTION).ceil() as usize).max(2);
    Ok(Z0Estimate {
        z0_um,
        decline: line_fit(&curve.dz_um[..decline_end], &eta0[..decline_end]),
        plateau: line_fit(&curve.dz_um[plateau_start..], &eta0[plateau_start..]),
    })
}
