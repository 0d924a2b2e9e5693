//! Weight programming: map a normalized weight onto an RRAM state.

use serde::{Deserialize, Serialize};

use super::cell::{cell_current_range, solve_cell, CellState, CellTopology, CurrentRange};
use super::rram::RramParams;
use crate::error::{Error, Result};

/// Optional write inaccuracy: the achieved current lands anywhere within
/// ±½ LSB of a `bits`-bit weight grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgrammingError {
    pub bits: u32,
}

impl Default for ProgrammingError {
    fn default() -> Self {
        Self { bits: 7 }
    }
}

impl ProgrammingError {
    pub fn lsb(&self) -> f64 {
        1.0 / f64::from(1u32 << self.bits.min(31))
    }
}

/// Programs a cell so that it draws `i_min + w·(i_max − i_min)` at
/// `(v_gate, v_cal)`.
pub fn program_weight(w: f64, template: &CellState, v_gate: f64, v_cal: f64) -> Result<RramParams> {
    let range = cell_current_range(template, v_gate, v_cal)?;
    program_weight_in(w, &range, template, v_gate, v_cal, None)
}

/// Same as [`program_weight`] with a precomputed window and an optional write
/// error. `error` carries the knob and a draw in `[-0.5, 0.5]` LSB.
pub fn program_weight_in(
    w: f64,
    range: &CurrentRange,
    template: &CellState,
    v_gate: f64,
    v_cal: f64,
    error: Option<(ProgrammingError, f64)>,
) -> Result<RramParams> {
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::contract(format!("weight must lie in [0, 1], got {w}")));
    }
    let rram = template.rram;
    let mut target = range.current_for(w);
    if let Some((knob, draw)) = error {
        target += draw.clamp(-0.5, 0.5) * knob.lsb() * range.dynamic_range();
    }
    if target >= range.i_max {
        return Ok(rram.with_r0(rram.r_on));
    }
    if target <= range.i_min {
        return Ok(rram.with_r0(rram.r_off));
    }
    let r0 = resistance_for_current(template, v_gate, v_cal, target)?;
    Ok(rram.with_r0(r0.clamp(rram.r_on, rram.r_off)))
}

/// Inverts the cell: the transistor fixes the internal node for the target
/// current, and the RRAM state follows from its I-V law across the drop.
fn resistance_for_current(template: &CellState, v_gate: f64, v_cal: f64, target: f64) -> Result<f64> {
    let m = &template.mosfet;
    // Transistor current is decreasing in the source node and increasing in
    // the drain node; bisect for the node that carries `target`.
    let too_low = |x: f64| match template.topology {
        CellTopology::SourceConnected => m.eval(v_gate - x, v_cal - x).current > target,
        CellTopology::DrainConnected => m.eval(v_gate, x).current < target,
    };
    let (mut lo, mut hi) = (0.0, v_cal);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if too_low(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = 0.5 * (lo + hi);
    let drop = match template.topology {
        CellTopology::SourceConnected => x,
        CellTopology::DrainConnected => v_cal - x,
    };
    if drop <= 0.0 {
        return Err(Error::Numerical(format!(
            "no RRAM drop left for target {target:.4e} A at v_cal={v_cal}"
        )));
    }
    let beta = template.rram.beta;
    Ok((beta * drop).sinh() / (beta * target))
}

/// Current the programmed cell actually draws at `(v_gate, v_cal)`.
pub fn readback(cell: &CellState, v_gate: f64, v_cal: f64) -> Result<f64> {
    Ok(solve_cell(cell, v_gate, v_cal)?.current)
}

/// Weight implied by a read current on the given window.
pub fn weight_from_current(range: &CurrentRange, current: f64) -> f64 {
    (current - range.i_min) / range.dynamic_range()
}
