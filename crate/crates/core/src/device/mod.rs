//! Compact device models and the series-cell solver.

pub mod cell;
pub mod local_error;
pub mod mosfet;
pub mod program;
pub mod rram;

pub use cell::{
    cell_current_range, solve_cell, BiasedCell, CellState, CellTopology, ConstantSink, CurrentRange,
    CurrentSink, OperatingPoint, Scaled, solve_with_slope,
};
pub use local_error::{clm_dibl_error, error_contour, local_error, mean_error, ContourPoint, ContourSpec};
pub use mosfet::{mosfet_current, MosfetParams};
pub use program::{program_weight, program_weight_in, readback, weight_from_current, ProgrammingError};
pub use rram::{rram_current, RramParams};
