//! Behavioral simulator for a time-domain vector-by-matrix multiplier built
//! from 1T-1R (transistor + RRAM) current sinks.
//!
//! * [`device`]: MOSFET and RRAM compact models, the series-cell solver,
//!   weight programming and local CLM/DIBL error.
//! * [`engine`]: the two-phase integrate/evaluate protocol, capacitor sizing,
//!   differential outputs and the closed-form reference.
//! * [`metrics`]: error and precision metrics, capacitor energy, Monte Carlo
//!   design-point evaluation, sweeps and the area/energy/throughput model.
//! * [`presets`]: named design points and sweep grids.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod device;
pub mod engine;
pub mod error;
pub mod metrics;
pub mod par;
pub mod presets;

pub use error::{Error, Result};
