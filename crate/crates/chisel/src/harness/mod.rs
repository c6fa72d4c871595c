//! Experiment-level pipelines: interaction-length sweeps, the
//! characteristic-length estimator, velocity averaging, power-law
//! scaling sweeps, and the CLI with all file output.

pub mod cli;
pub mod crossing;
pub mod output;
pub mod scaling;
pub mod sweep;
pub mod velocity;

pub use cli::run_cli;
pub use crossing::{crossing_abscissa, extract_z0, Z0Estimate};
pub use scaling::{powerlaw_grid, powerlaw_scaling_sweep, powerlaw_t0_and_width, PowerlawSweepPoint};
pub use sweep::{run_diffraction_sweep, run_diffraction_sweep_seq, EfficiencyCurve, SweepConfig, SweepResult};
pub use velocity::{velocity_average, velocity_draws, VelocityAveraging, VelocityDraw};
