//! Units convention, parameter reduction, grids, potentials and initial
//! states shared by all other modules.
//!
//! Internally everything is dimensionless: positions ξ = kx, times
//! τ = ω_r t, so the Schrödinger equation reads
//! i ∂_τ φ = [−∂²_ξ − i V(ξ)] φ with V = s sin²ξ (or s ξ² near a node)
//! and the single coupling s = Ω0²/(2 ω_r Γ).

pub mod config;
pub mod grid;
pub mod params;
pub mod potential;
pub mod state;

pub use config::SimConfig;
pub use grid::{make_grid, Grid};
pub use params::{reduce_params, DimensionlessParams, PhysicalParams};
pub use potential::{resolution_guard, PotentialSpec};
pub use state::{make_initial_state, InitialKind, WaveState};
