//! The series 1T-1R cell and its operating-point solver.

use serde::{Deserialize, Serialize};

use super::mosfet::MosfetParams;
use super::rram::RramParams;
use crate::error::{Error, Result};

/// Where the RRAM sits relative to the access transistor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum CellTopology {
    /// RRAM between the transistor source and ground (self-compensating cell).
    #[default]
    SourceConnected,
    /// RRAM between the column node and the transistor drain (conventional cell).
    DrainConnected,
}

impl CellTopology {
    pub fn name(self) -> &'static str {
        match self {
            CellTopology::SourceConnected => "source-connected",
            CellTopology::DrainConnected => "drain-connected",
        }
    }
}

impl std::str::FromStr for CellTopology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "source-connected" | "source" => Ok(CellTopology::SourceConnected),
            "drain-connected" | "drain" => Ok(CellTopology::DrainConnected),
            other => Err(Error::config(format!("unknown cell topology '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct CellState {
    pub mosfet: MosfetParams,
    pub rram: RramParams,
    pub topology: CellTopology,
}

impl CellState {
    pub fn validate(&self) -> Result<()> {
        self.mosfet.validate()?;
        self.rram.validate()
    }

    pub fn with_r0(mut self, r0: f64) -> Self {
        self.rram.r0 = r0;
        self
    }

    pub fn with_topology(mut self, topology: CellTopology) -> Self {
        self.topology = topology;
        self
    }
}

/// Solution of the series cell at one bias point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    pub current: f64,
    /// Source voltage (source-connected) or drain voltage (drain-connected).
    pub v_internal: f64,
}

pub const MAX_ITERATIONS: usize = 200;
/// Accepted relative current mismatch between the two series devices.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;
const CURRENT_FLOOR: f64 = 1e-12;

fn check_bias(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::contract(format!("{name} must lie in [0, 1] V, got {v}")));
    }
    Ok(())
}

/// Finds the internal node voltage at which transistor and RRAM carry the
/// same current.
pub fn solve_cell(cell: &CellState, v_gate: f64, v_node: f64) -> Result<OperatingPoint> {
    check_bias("v_gate", v_gate)?;
    check_bias("v_node", v_node)?;
    solve_unchecked(cell, v_gate, v_node)
}

/// Mismatch `g(u)` between the two branches as a function of the RRAM
/// voltage drop `u`, with its derivative and the RRAM current. `g` is
/// strictly decreasing in `u` for both topologies.
#[inline]
fn mismatch(cell: &CellState, v_gate: f64, v_node: f64, u: f64) -> (f64, f64, f64) {
    let i_r = cell.rram.current(u);
    let g_r = cell.rram.conductance(u);
    match cell.topology {
        CellTopology::SourceConnected => {
            let m = cell.mosfet.eval(v_gate - u, v_node - u);
            (m.current - i_r, -m.d_vgs - m.d_vds - g_r, i_r)
        }
        CellTopology::DrainConnected => {
            let m = cell.mosfet.eval(v_gate, v_node - u);
            (m.current - i_r, -m.d_vds - g_r, i_r)
        }
    }
}

/// Internal node voltage for an RRAM drop `u`.
#[inline]
fn internal_node(topology: CellTopology, v_node: f64, u: f64) -> f64 {
    match topology {
        CellTopology::SourceConnected => u,
        CellTopology::DrainConnected => v_node - u,
    }
}

pub(crate) fn solve_unchecked(cell: &CellState, v_gate: f64, v_node: f64) -> Result<OperatingPoint> {
    if v_node <= 0.0 {
        return Ok(OperatingPoint {
            current: 0.0,
            v_internal: 0.0,
        });
    }
    let (mut lo, mut hi) = (0.0_f64, v_node);
    let mut x = 0.0;
    let mut last = (f64::INFINITY, 0.0);
    for _ in 0..MAX_ITERATIONS {
        let (g, dg, i_r) = mismatch(cell, v_gate, v_node, x);
        let scale = i_r.abs().max(CURRENT_FLOOR);
        last = (g / scale, i_r);
        if g.abs() <= 1e-13 * scale {
            return Ok(OperatingPoint {
                current: i_r.max(0.0),
                v_internal: internal_node(cell.topology, v_node, x),
            });
        }
        if g > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= 4.0 * f64::EPSILON * v_node {
            break;
        }
        let newton = if dg < 0.0 { x - g / dg } else { f64::NAN };
        x = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    let (g, _, i_r) = mismatch(cell, v_gate, v_node, x);
    let residual = g.abs() / i_r.abs().max(CURRENT_FLOOR);
    if residual < RESIDUAL_TOLERANCE {
        Ok(OperatingPoint {
            current: i_r.max(0.0),
            v_internal: internal_node(cell.topology, v_node, x),
        })
    } else {
        Err(Error::NonConvergence {
            iterations: MAX_ITERATIONS,
            residual: residual.min(last.0.abs()),
            context: format!(
                "{} cell, v_gate={v_gate}, v_node={v_node}, r0={}, bracket=[{lo}, {hi}]",
                cell.topology.name(),
                cell.rram.r0
            ),
        })
    }
}

/// Cell current and its sensitivity to the column node, `(I, dI/dv_node)`.
///
/// The slope follows from implicit differentiation of the branch balance.
pub fn solve_with_slope(cell: &CellState, v_gate: f64, v_node: f64) -> Result<(f64, f64)> {
    let op = solve_unchecked(cell, v_gate, v_node)?;
    if v_node <= 0.0 {
        // Both topologies conduct linearly through the origin; take the
        // one-sided slope.
        let h = 1e-9;
        let i = solve_unchecked(cell, v_gate, h)?.current;
        return Ok((0.0, i / h));
    }
    let x = op.v_internal;
    let slope = match cell.topology {
        CellTopology::SourceConnected => {
            let m = cell.mosfet.eval(v_gate - x, v_node - x);
            let g_r = cell.rram.conductance(x);
            // dI/dv_node = g_r · dx/dv_node, dx/dv_node = g_ds / (g_m + g_ds + g_r)
            g_r * m.d_vds / (m.d_vgs + m.d_vds + g_r)
        }
        CellTopology::DrainConnected => {
            let m = cell.mosfet.eval(v_gate, x);
            let g_r = cell.rram.conductance(v_node - x);
            m.d_vds * g_r / (g_r + m.d_vds)
        }
    };
    Ok((op.current, slope))
}

/// Anything that sinks a node-voltage-dependent current from a column.
pub trait CurrentSink: Send + Sync {
    fn sink_current(&self, v_node: f64) -> Result<f64>;

    /// `(I, dI/dv_node)`. The default uses a central difference.
    fn current_and_slope(&self, v_node: f64) -> Result<(f64, f64)> {
        let h = 1e-6;
        let i = self.sink_current(v_node)?;
        let up = self.sink_current(v_node + h)?;
        let down = self.sink_current((v_node - h).max(0.0))?;
        let span = v_node + h - (v_node - h).max(0.0);
        Ok((i, (up - down) / span))
    }
}

/// A cell with its gate held at a fixed voltage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasedCell {
    pub cell: CellState,
    pub v_gate: f64,
}

impl CurrentSink for BiasedCell {
    fn sink_current(&self, v_node: f64) -> Result<f64> {
        solve_unchecked(&self.cell, self.v_gate, v_node.clamp(0.0, 1.0)).map(|op| op.current)
    }

    fn current_and_slope(&self, v_node: f64) -> Result<(f64, f64)> {
        solve_with_slope(&self.cell, self.v_gate, v_node.clamp(0.0, 1.0))
    }
}

/// Voltage-independent current (ideal current source).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantSink(pub f64);

impl CurrentSink for ConstantSink {
    fn sink_current(&self, _v_node: f64) -> Result<f64> {
        Ok(self.0)
    }

    fn current_and_slope(&self, _v_node: f64) -> Result<(f64, f64)> {
        Ok((self.0, 0.0))
    }
}

/// `factor` identical copies of an inner sink in parallel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled<S> {
    pub inner: S,
    pub factor: f64,
}

impl<S: CurrentSink> CurrentSink for Scaled<S> {
    fn sink_current(&self, v_node: f64) -> Result<f64> {
        Ok(self.factor * self.inner.sink_current(v_node)?)
    }

    fn current_and_slope(&self, v_node: f64) -> Result<(f64, f64)> {
        let (i, d) = self.inner.current_and_slope(v_node)?;
        Ok((self.factor * i, self.factor * d))
    }
}

/// Programmable current window of a cell at one calibration point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurrentRange {
    pub i_min: f64,
    pub i_max: f64,
}

impl CurrentRange {
    pub fn new(i_min: f64, i_max: f64) -> Result<Self> {
        if !(i_min.is_finite() && i_max.is_finite() && i_min >= 0.0) {
            return Err(Error::config(format!("invalid current range [{i_min}, {i_max}]")));
        }
        if i_min >= i_max {
            return Err(Error::config(format!(
                "degenerate RRAM window: i_min {i_min:.4e} A >= i_max {i_max:.4e} A"
            )));
        }
        Ok(Self { i_min, i_max })
    }

    pub fn dynamic_range(&self) -> f64 {
        self.i_max - self.i_min
    }

    /// Current for a normalized weight.
    pub fn current_for(&self, w: f64) -> f64 {
        self.i_min + w * self.dynamic_range()
    }

    /// Multiplicative output coefficient `(i_max − i_min) / i_max`.
    pub fn gain(&self) -> f64 {
        self.dynamic_range() / self.i_max
    }
}

/// Cell current with the RRAM at `r_off` (minimum) and `r_on` (maximum).
pub fn cell_current_range(template: &CellState, v_gate: f64, v_cal: f64) -> Result<CurrentRange> {
    let i_max = solve_cell(&template.with_r0(template.rram.r_on), v_gate, v_cal)?.current;
    let i_min = solve_cell(&template.with_r0(template.rram.r_off), v_gate, v_cal)?.current;
    CurrentRange::new(i_min, i_max)
}
