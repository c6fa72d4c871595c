//! Simulator and analysis toolkit for nonspreading matter-wave packets
//! formed by spatially modulated absorption.
//!
//! A standing light wave tuned exactly on resonance acts on an open
//! two-level atom as a purely imaginary potential −iV(ξ): absorption
//! keeps chiseling away at a broad incoming wave until the contraction
//! balances quantum spreading and a stationary complex Gaussian remains.
//! The crate provides
//!
//! - [`core`]: units convention, grids, potentials, initial states;
//! - [`analytic`]: the closed-form packet and its scaling laws;
//! - [`propagator`]: split-operator evolution of the one-channel model,
//!   [`two_level`]: the full open two-level dynamics;
//! - [`observables`]: momentum spectra, diffraction orders, the thin
//!   probing grating and fringe-phase extraction;
//! - [`eigenmodes`]: slowest-decaying modes and log-log scaling fits;
//! - [`harness`]: sweep pipelines, the z0 estimator, velocity averaging
//!   and the CLI.

pub mod analytic;
pub mod core;
pub mod eigenmodes;
pub mod error;
pub mod exec;
pub mod harness;
pub mod observables;
pub mod propagator;
pub mod two_level;

pub use error::{Error, Result};
