//! Command-line interface. Every subcommand reads a JSON config, writes
//! CSV files with a header row plus a JSON metadata sidecar, and exits 0
//! on success, 2 on configuration errors, 3 on numerical failures and 64
//! on usage errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::analytic::{
    self, asymptotic_order_amplitudes, decay_rate, gaussian_solution, packet_width,
    quadratic_phase_coefficient, stationary_width, GaussianSolutionParams,
};
use crate::core::{make_initial_state, resolution_guard, InitialKind, PotentialSpec, SimConfig};
use crate::eigenmodes::{fit_scaling, ground_mode, GroundModeConfig};
use crate::error::{Error, Result};
use crate::harness::crossing::extract_z0;
use crate::harness::output::{fmt_f64, write_csv, write_meta};
use crate::harness::scaling::{powerlaw_scaling_sweep, rms_width};
use crate::harness::sweep::{coupling_for, run_diffraction_sweep, EfficiencyCurve, SweepConfig};
use crate::harness::velocity::{velocity_average, velocity_draws, VelocityAveraging};
use crate::observables::{
    diffraction_amplitudes, fit_fringe_phase, phi_grid, windowed_efficiencies, Fringe, Normalization,
};
use crate::propagator::{evolve, evolve_with_snapshots, EvolveConfig};

#[derive(Parser)]
#[command(name = "chisel", version, about = "Nonspreading wave packets in absorptive optical lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the closed-form packet solution and derived quantities
    Analytic {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Largest dimensionless time on the τ grid
        #[arg(long, default_value_t = 3.0)]
        tau_max: f64,
        #[arg(long, default_value_t = 48)]
        tau_steps: usize,
        #[arg(long, default_value_t = 129)]
        xi_points: usize,
    },
    /// Propagate the configured initial state and record observables
    Evolve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Potential profile: sinusoidal or quadratic
        #[arg(long, default_value = "sinusoidal")]
        potential: String,
    },
    /// Diffraction efficiencies against interaction length
    Diffraction {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Formation length z0 across a Rabi-frequency list, with scaling fit
    Z0 {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated Ω0/Γ values
        #[arg(long, value_delimiter = ',')]
        omega0: Vec<f64>,
    },
    /// Probe-phase interference fringe, optionally the two-length protocol
    Interfere {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        order: Option<i32>,
        #[arg(long)]
        phi_steps: Option<usize>,
        /// Interaction length in μm (defaults to the last sweep point)
        #[arg(long)]
        dz_um: Option<f64>,
        /// Reference interaction length; enables the phase-difference protocol
        #[arg(long)]
        dz_ref_um: Option<f64>,
    },
    /// Slowest-decaying eigenmode of the chosen potential
    Eigenmode {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "sinusoidal")]
        potential: String,
        #[arg(long, default_value_t = 1)]
        power_n: u32,
        #[arg(long, default_value_t = 0.2)]
        q_over_k: f64,
    },
    /// Power-law scaling exponents for t0 and the stationary width
    Scaling {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated power-law indices
        #[arg(long, value_delimiter = ',', default_value = "1,3")]
        power_n: Vec<u32>,
        /// Comma-separated Ω0/Γ values
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.4,0.8")]
        omega0: Vec<f64>,
        #[arg(long, default_value_t = 0.2)]
        q_over_k: f64,
    },
}

/// Parses and runs; returns the process exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Analytic { config, out, tau_max, tau_steps, xi_points } => {
            cmd_analytic(&config, &out, tau_max, tau_steps, xi_points)
        }
        Command::Evolve { config, out, potential } => cmd_evolve(&config, &out, &potential),
        Command::Diffraction { config, out } => cmd_diffraction(&config, &out),
        Command::Z0 { config, out, omega0 } => cmd_z0(&config, &out, &omega0),
        Command::Interfere { config, out, order, phi_steps, dz_um, dz_ref_um } => {
            cmd_interfere(&config, &out, order, phi_steps, dz_um, dz_ref_um)
        }
        Command::Eigenmode { config, out, potential, power_n, q_over_k } => {
            cmd_eigenmode(&config, &out, &potential, power_n, q_over_k)
        }
        Command::Scaling { config, out, power_n, omega0, q_over_k } => {
            cmd_scaling(&config, &out, &power_n, &omega0, q_over_k)
        }
    }
}

fn config_echo(cfg: &SimConfig) -> Result<Value> {
    Ok(serde_json::to_value(cfg)?)
}

fn potential_from_name(name: &str, s: f64, power_n: u32, q_over_k: f64) -> Result<PotentialSpec> {
    match name {
        "sinusoidal" => Ok(PotentialSpec::SinusoidalImaginary { s }),
        "quadratic" => Ok(PotentialSpec::QuadraticImaginary { s }),
        "powerlaw" => Ok(PotentialSpec::PowerLaw { n: power_n, q_over_k, s_tilde: s }),
        other => Err(Error::Config(format!(
            "unknown potential `{other}` (expected sinusoidal, quadratic or powerlaw)"
        ))),
    }
}

fn cmd_analytic(config: &Path, out: &Path, tau_max: f64, tau_steps: usize, xi_points: usize) -> Result<()> {
    let cfg = SimConfig::from_path(config)?;
    let d = cfg.dimensionless()?;
    let p = GaussianSolutionParams::new(d.s)?;
    let half = cfg.periods as f64 * std::f64::consts::PI / 2.0;
    let mut rows = Vec::new();
    for i in 0..=tau_steps {
        let tau = tau_max * i as f64 / tau_steps.max(1) as f64;
        for j in 0..xi_points.max(2) {
            let xi = -half + 2.0 * half * j as f64 / (xi_points.max(2) - 1) as f64;
            let v = gaussian_solution(xi, tau, &p)?;
            rows.push(vec![fmt_f64(tau), fmt_f64(xi), fmt_f64(v.re), fmt_f64(v.im)]);
        }
    }
    write_csv(&out.join("gaussian.csv"), &["tau", "xi", "re", "im"], &rows)?;

    let mut width_rows = Vec::new();
    for i in 0..=tau_steps {
        let tau = tau_max * i as f64 / tau_steps.max(1) as f64;
        width_rows.push(vec![fmt_f64(tau), fmt_f64(packet_width(tau, &p)?)]);
    }
    write_csv(&out.join("widths.csv"), &["tau", "width"], &width_rows)?;

    let w = stationary_width(&p);
    let qp = quadratic_phase_coefficient(&p);
    let orders = asymptotic_order_amplitudes(3, &p);
    let mut extra = Map::new();
    extra.insert("s".into(), json!(d.s));
    extra.insert("omega0_bar".into(), json!(d.omega0_bar));
    extra.insert("stationary_width_exact".into(), json!(w.exact));
    extra.insert("stationary_width_paper_combination".into(), json!(w.paper_combination));
    extra.insert("decay_rate_over_omega_r".into(), json!(decay_rate(&p)));
    extra.insert("quadratic_phase_magnitude".into(), json!(qp.magnitude));
    extra.insert("quadratic_phase_sign".into(), json!(qp.sign));
    extra.insert("phi2".into(), json!(analytic::phi2(&p)));
    extra.insert(
        "asymptotic_orders".into(),
        json!(orders.iter().map(|a| json!({"re": a.re, "im": a.im})).collect::<Vec<_>>()),
    );
    write_meta(&out.join("analytic.meta.json"), &config_echo(&cfg)?, None, extra)
}

fn cmd_evolve(config: &Path, out: &Path, potential: &str) -> Result<()> {
    let cfg = SimConfig::from_path(config)?;
    let d = cfg.dimensionless()?;
    let grid = cfg.grid()?;
    let spec = potential_from_name(potential, d.s, 1, 0.2)?;
    resolution_guard(&spec, &grid)?;
    let v = spec.sample(&grid)?;
    let evolve_section = cfg.evolve.clone();
    let dt = evolve_section
        .as_ref()
        .and_then(|e| e.dt)
        .unwrap_or_else(|| EvolveConfig::auto_dt(&grid, &v));
    let tau_final = evolve_section
        .as_ref()
        .and_then(|e| e.tau_final)
        .unwrap_or(8.0 / d.omega0_bar);
    let stride = evolve_section.as_ref().map_or(50, |e| e.observer_stride);
    let initial = make_initial_state(&grid, &cfg.initial_kind()?)?;
    let cfg_ev = EvolveConfig { dt, tau_final, observer_stride: stride, renormalize: false };
    let traj = evolve(&grid, &initial, &v, &cfg_ev)?;
    let mut rows = Vec::new();
    for snap in &traj.snapshots {
        let table = diffraction_amplitudes(&grid, snap, 3.min(grid.points_per_period() as i32 / 2), Normalization::Raw)?;
        let eta0_raw = table.efficiency(0).unwrap();
        let total: f64 = table.efficiencies.iter().sum();
        let eta0_norm = if total > 0.0 { eta0_raw / total } else { 0.0 };
        rows.push(vec![
            fmt_f64(snap.tau),
            fmt_f64(snap.survival),
            fmt_f64(rms_width(&grid, &snap.amplitudes)),
            fmt_f64(eta0_raw),
            fmt_f64(eta0_norm),
        ]);
    }
    write_csv(
        &out.join("evolution.csv"),
        &["tau", "survival", "width_rms", "eta0_raw", "eta0_norm"],
        &rows,
    )?;
    let mut extra = Map::new();
    extra.insert("s".into(), json!(d.s));
    extra.insert("dt".into(), json!(dt));
    extra.insert("tau_final".into(), json!(tau_final));
    extra.insert("potential".into(), json!(potential));
    write_meta(&out.join("evolution.meta.json"), &config_echo(&cfg)?, None, extra)
}

fn sweep_from_config(cfg: &SimConfig) -> Result<SweepConfig> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("config section `sweep` required for this pipeline".into()))?;
    let omega0 = cfg
        .omega0_over_gamma
        .ok_or_else(|| Error::Config("config key `omega0_over_gamma` required".into()))?;
    Ok(SweepConfig {
        omega0_over_gamma: vec![omega0],
        dz_um: sweep.dz_um.clone(),
        velocity_averaging: cfg.velocity_spreads.as_ref().map(|v| VelocityAveraging {
            samples: v.samples,
            dv_l: v.dv_l,
            dv_t: v.dv_t,
            seed: v.seed,
        }),
        n_orders: sweep.orders,
        raman_nath: sweep.raman_nath,
        output_dir: None,
    })
}

fn efficiency_rows(curve: &EfficiencyCurve) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for (i, &dz) in curve.dz_um.iter().enumerate() {
        for (j, &order) in curve.orders.iter().enumerate() {
            rows.push(vec![
                fmt_f64(dz),
                order.to_string(),
                fmt_f64(curve.eta[i][j]),
                fmt_f64(curve.survival[i]),
            ]);
        }
    }
    rows
}

fn cmd_diffraction(config: &Path, out: &Path) -> Result<()> {
    let cfg = SimConfig::from_path(config)?;
    let phys = cfg.physical()?;
    for w in phys.validate()? {
        eprintln!("warning: {w}");
    }
    let grid = cfg.grid()?;
    let sweep = sweep_from_config(&cfg)?;
    let result = run_diffraction_sweep(&phys, &grid, &sweep)?;
    let header = ["dz_um", "order", "eta", "survival"];
    write_csv(&out.join("efficiencies.csv"), &header, &efficiency_rows(&result.curves[0]))?;
    if let Some(raman) = &result.raman_nath {
        write_csv(&out.join("raman_nath.csv"), &header, &efficiency_rows(&raman[0]))?;
    }
    let mut extra = Map::new();
    extra.insert("s".into(), json!(coupling_for(&phys, sweep.omega0_over_gamma[0])?.s));
    extra.insert("orders".into(), json!(sweep.n_orders));
    write_meta(
        &out.join("efficiencies.meta.json"),
        &config_echo(&cfg)?,
        sweep.velocity_averaging.map(|v| v.seed),
        extra,
    )
}

fn cmd_z0(config: &Path, out: &Path, omega0: &[f64]) -> Result<()> {
    if omega0.len() < 2 {
        return Err(Error::Config("z0 needs at least two --omega0 values".into()));
    }
    let cfg = SimConfig::from_path(config)?;
    let phys = cfg.physical()?;
    let grid = cfg.grid()?;
    let mut sweep = sweep_from_config(&cfg)?;
    sweep.omega0_over_gamma = omega0.to_vec();
    sweep.raman_nath = false;
    let result = run_diffraction_sweep(&phys, &grid, &sweep)?;
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for curve in &result.curves {
        let est = extract_z0(curve)?;
        rows.push(vec![fmt_f64(curve.omega0_over_gamma), fmt_f64(est.z0_um)]);
        points.push((curve.omega0_over_gamma, est.z0_um));
    }
    write_csv(&out.join("z0.csv"), &["omega0_over_gamma", "z0_um"], &rows)?;
    let fit = fit_scaling(&points, -1.0)?;
    let mut extra = Map::new();
    extra.insert("slope".into(), json!(fit.slope));
    extra.insert("slope_stderr".into(), json!(fit.stderr));
    extra.insert("predicted_exponent".into(), json!(fit.predicted));
    extra.insert("within_two_sigma".into(), json!(fit.within_two_sigma));
    write_meta(
        &out.join("z0.meta.json"),
        &config_echo(&cfg)?,
        sweep.velocity_averaging.map(|v| v.seed),
        extra,
    )
}

/// Velocity-averaged fringe at one interaction length.
fn averaged_fringe(
    cfg: &SimConfig,
    dz_um: f64,
    eta: Complex64,
    order: i32,
    phis: &[f64],
) -> Result<Fringe> {
    let phys = cfg.physical()?;
    let grid = cfg.grid()?;
    let d = cfg.dimensionless()?;
    let spec = PotentialSpec::SinusoidalImaginary { s: d.s };
    resolution_guard(&spec, &grid)?;
    let v = spec.sample(&grid)?;
    let dt = EvolveConfig::auto_dt(&grid, &v);
    let averaging = cfg
        .velocity_spreads
        .as_ref()
        .map(|vs| VelocityAveraging { samples: vs.samples, dv_l: vs.dv_l, dv_t: vs.dv_t, seed: vs.seed })
        .unwrap_or_else(VelocityAveraging::none);
    let draws = velocity_draws(&phys, &averaging);
    let intensity = velocity_average(
        &draws,
        |draw| {
            let spacing = grid.kappa_spacing();
            let kappa0 = (draw.kappa_t / spacing).round() * spacing;
            let initial = make_initial_state(&grid, &InitialKind::PlaneWave { kappa0 })?;
            let steps = [((phys.tau_of_dz_um_at(dz_um, draw.v_l)) / dt).round() as usize];
            let snaps = evolve_with_snapshots(&grid, &initial, &v, dt, &steps, false)?;
            let state = &snaps[0];
            // window readout tolerates the quasimomentum offset
            phis.iter()
                .map(|&phi| {
                    let probe = crate::observables::ProbeSpec::new(eta, phi)?;
                    let probed = crate::observables::apply_probe(&grid, state, &probe)?;
                    let etas = windowed_efficiencies(&grid, &probed, order.abs());
                    Ok(etas[(order + order.abs()) as usize])
                })
                .collect()
        },
        true,
    )?;
    Ok(Fringe { phi_s: phis.to_vec(), intensity, order })
}

fn cmd_interfere(
    config: &Path,
    out: &Path,
    order: Option<i32>,
    phi_steps: Option<usize>,
    dz_um: Option<f64>,
    dz_ref_um: Option<f64>,
) -> Result<()> {
    let cfg = SimConfig::from_path(config)?;
    let probe = cfg
        .probe
        .as_ref()
        .ok_or_else(|| Error::Config("config section `probe` required for interfere".into()))?;
    let eta = Complex64::new(probe.eta_re, probe.eta_im);
    let order = order.unwrap_or(probe.order);
    let n_phi = phi_steps.unwrap_or(probe.phi_steps);
    let dz = match dz_um.or_else(|| cfg.sweep.as_ref().and_then(|s| s.dz_um.last().copied())) {
        Some(x) => x,
        None => return Err(Error::Config("provide --dz-um or a sweep section".into())),
    };
    let phis = phi_grid(n_phi);
    let fringe = averaged_fringe(&cfg, dz, eta, order, &phis)?;
    let fit = fit_fringe_phase(&fringe)?;
    let rows: Vec<Vec<String>> = fringe
        .phi_s
        .iter()
        .zip(&fringe.intensity)
        .map(|(&p, &i)| vec![fmt_f64(p), fmt_f64(i)])
        .collect();
    write_csv(&out.join("fringe.csv"), &["phi_s", "intensity"], &rows)?;
    let mut extra = Map::new();
    extra.insert("order".into(), json!(order));
    extra.insert("dz_um".into(), json!(dz));
    extra.insert("theta".into(), json!(fit.theta));
    extra.insert("sigma_theta".into(), json!(fit.sigma_theta));
    extra.insert("amplitude".into(), json!(fit.amplitude));
    extra.insert("offset".into(), json!(fit.offset));
    if let Some(dz_ref) = dz_ref_um {
        let fringe_ref = averaged_fringe(&cfg, dz_ref, eta, order, &phis)?;
        let fit_ref = fit_fringe_phase(&fringe_ref)?;
        let rows_ref: Vec<Vec<String>> = fringe_ref
            .phi_s
            .iter()
            .zip(&fringe_ref.intensity)
            .map(|(&p, &i)| vec![fmt_f64(p), fmt_f64(i)])
            .collect();
        write_csv(&out.join("fringe_ref.csv"), &["phi_s", "intensity"], &rows_ref)?;
        let mut delta = fit.theta - fit_ref.theta;
        while delta > std::f64::consts::PI {
            delta -= 2.0 * std::f64::consts::PI;
        }
        while delta <= -std::f64::consts::PI {
            delta += 2.0 * std::f64::consts::PI;
        }
        extra.insert("dz_ref_um".into(), json!(dz_ref));
        extra.insert("theta_ref".into(), json!(fit_ref.theta));
        extra.insert("sigma_theta_ref".into(), json!(fit_ref.sigma_theta));
        extra.insert("delta_phase_abs".into(), json!(delta.abs()));
        if order == 3 {
            extra.insert("phi2_abs_estimate".into(), json!(delta.abs() / 3.0));
        }
    }
    write_meta(
        &out.join("fringe.meta.json"),
        &config_echo(&cfg)?,
        cfg.velocity_spreads.as_ref().map(|v| v.seed),
        extra,
    )
}

fn cmd_eigenmode(config: &Path, out: &Path, potential: &str, power_n: u32, q_over_k: f64) -> Result<()> {
    let cfg = SimConfig::from_path(config)?;
    let d = cfg.dimensionless()?;
    let grid = cfg.grid()?;
    let spec = potential_from_name(potential, d.s, power_n, q_over_k)?;
    resolution_guard(&spec, &grid)?;
    let v = spec.sample(&grid)?;
    let gm_cfg = GroundModeConfig::auto(&grid, &v);
    let mode = ground_mode(&grid, &v, &gm_cfg)?;
    let rows: Vec<Vec<String>> = grid
        .xi()
        .iter()
        .zip(&mode.samples)
        .map(|(&xi, a)| vec![fmt_f64(xi), fmt_f64(a.re), fmt_f64(a.im), fmt_f64(a.norm_sqr())])
        .collect();
    write_csv(&out.join("eigenmode.csv"), &["xi", "re", "im", "density"], &rows)?;
    let mut extra = Map::new();
    extra.insert("potential".into(), json!(potential));
    extra.insert("eigenvalue_re".into(), json!(mode.eigenvalue.re));
    extra.insert("eigenvalue_im".into(), json!(mode.eigenvalue.im));
    extra.insert("decay_rate".into(), json!(-2.0 * mode.eigenvalue.im));
    extra.insert("residual".into(), json!(mode.residual));
    extra.insert("iterations".into(), json!(mode.iterations));
    write_meta(&out.join("eigenmode.meta.json"), &config_echo(&cfg)?, None, extra)
}

fn cmd_scaling(config: &Path, out: &Path, power_n: &[u32], omega0: &[f64], q_over_k: f64) -> Result<()> {
    let cfg = SimConfig::from_path(config)?;
    let omega_r_over_gamma = cfg
        .omega_r_over_gamma
        .ok_or_else(|| Error::Config("config key `omega_r_over_gamma` required for scaling".into()))?;
    let mut rows = Vec::new();
    let mut extra = Map::new();
    for &n in power_n {
        let points = powerlaw_scaling_sweep(n, omega0, omega_r_over_gamma, q_over_k)?;
        for p in &points {
            rows.push(vec![
                n.to_string(),
                fmt_f64(p.omega0_over_gamma),
                fmt_f64(p.s_tilde),
                fmt_f64(p.t0_tau),
                fmt_f64(p.width),
            ]);
        }
        let t0_fit = fit_scaling(
            &points.iter().map(|p| (p.omega0_over_gamma, p.t0_tau)).collect::<Vec<_>>(),
            -2.0 / (n as f64 + 1.0),
        )?;
        let w_fit = fit_scaling(
            &points.iter().map(|p| (p.omega0_over_gamma, p.width)).collect::<Vec<_>>(),
            -1.0 / (n as f64 + 1.0),
        )?;
        extra.insert(
            format!("n{n}"),
            json!({
                "t0_slope": t0_fit.slope,
                "t0_stderr": t0_fit.stderr,
                "t0_predicted": t0_fit.predicted,
                "t0_within_two_sigma": t0_fit.within_two_sigma,
                "width_slope": w_fit.slope,
                "width_stderr": w_fit.stderr,
                "width_predicted": w_fit.predicted,
                "width_within_two_sigma": w_fit.within_two_sigma,
            }),
        );
    }
    write_csv(
        &out.join("scaling.csv"),
        &["n", "omega0_over_gamma", "s_tilde", "t0_tau", "width"],
        &rows,
    )?;
    write_meta(&out.join("scaling.meta.json"), &config_echo(&cfg)?, None, extra)
}
