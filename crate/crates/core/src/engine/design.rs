use serde::{Deserialize, Serialize};

use crate::device::{cell_current_range, CellState, CurrentRange, ProgrammingError};
use crate::error::{Error, Result};

/// How cell currents are evaluated inside the integrator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CellEvaluation {
    /// Solve every cell at every integrator stage.
    Exact,
    /// Sample each cell's I(V) once on a uniform grid over `[0, v_reset]`
    /// and interpolate with cubic Hermite segments using exact slopes.
    Tabulated { points: usize },
    /// Tabulate cells programmed to `levels` uniformly spaced weights once
    /// per design and blend neighbouring curves for each cell. Falls back to
    /// per-cell tables when rows or cells differ from the nominal device.
    Family { points: usize, levels: usize },
}

impl CellEvaluation {
    /// Grid size of the tabulated modes.
    pub fn points(&self) -> Option<usize> {
        match *self {
            CellEvaluation::Exact => None,
            CellEvaluation::Tabulated { points } | CellEvaluation::Family { points, .. } => Some(points),
        }
    }
}

impl Default for CellEvaluation {
    fn default() -> Self {
        CellEvaluation::Family {
            points: 257,
            levels: 257,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorSettings {
    /// RK4 steps per time window T.
    pub steps_per_window: usize,
    pub evaluation: CellEvaluation,
    /// Threshold-crossing bisection stops below this fraction of T.
    pub crossing_tolerance: f64,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        Self {
            steps_per_window: 1024,
            evaluation: CellEvaluation::default(),
            crossing_tolerance: 1e-10,
        }
    }
}

/// Optional circuit non-idealities. All default to off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct Nonidealities {
    /// Gate-drain coupling capacitance per cell (F); each falling input edge
    /// pulls the column down by `c_gd · v_gate_on / C`.
    pub c_gd_coupling: f64,
    /// Fractional gate-voltage drop per row along the input line: row `i`
    /// sees `v_gate_on · (1 − i · attenuation)`.
    pub gate_line_attenuation: f64,
    /// Standard deviation of the per-cell threshold mismatch (V).
    pub mismatch_sigma_vt: f64,
    pub programming_error: Option<ProgrammingError>,
}

/// One complete VMM configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignPoint {
    pub m_rows: usize,
    /// Signed outputs; each is a differential pair of physical columns.
    pub n_cols: usize,
    pub v_gate_on: f64,
    pub v_reset: f64,
    pub v_th_neuron: f64,
    pub t_window: f64,
    /// Device template; `rram.r0` is ignored (set by programming).
    pub cell: CellState,
    pub output_bits: u32,
    /// Load capacitor sized for `max_current_scale · M · i_max`.
    pub max_current_scale: f64,
    /// Node voltage at which weights are programmed; midpoint of the swing
    /// when `None`.
    pub v_cal: Option<f64>,
    pub nonideal: Nonidealities,
    pub integrator: IntegratorSettings,
}

impl Default for DesignPoint {
    fn default() -> Self {
        Self {
            m_rows: 16,
            n_cols: 16,
            v_gate_on: 0.3,
            v_reset: 0.9,
            v_th_neuron: 0.7,
            t_window: 16e-9,
            cell: CellState::default(),
            output_bits: 4,
            max_current_scale: 1.0,
            v_cal: None,
            nonideal: Nonidealities::default(),
            integrator: IntegratorSettings::default(),
        }
    }
}

impl DesignPoint {
    pub fn validate(&self) -> Result<()> {
        if self.m_rows == 0 || self.n_cols == 0 {
            return Err(Error::config("m_rows and n_cols must be >= 1"));
        }
        if !(self.v_th_neuron > 0.0 && self.v_th_neuron < self.v_reset && self.v_reset <= 1.0) {
            return Err(Error::config(format!(
                "need 0 < v_th_neuron < v_reset <= 1 V, got v_th={} v_reset={}",
                self.v_th_neuron, self.v_reset
            )));
        }
        if !(self.v_gate_on > 0.0 && self.v_gate_on <= 1.0) {
            return Err(Error::config(format!("v_gate_on must lie in (0, 1] V, got {}", self.v_gate_on)));
        }
        if !(self.t_window > 0.0 && self.t_window.is_finite()) {
            return Err(Error::config("t_window must be > 0"));
        }
        if self.output_bits == 0 || self.output_bits > 30 {
            return Err(Error::config("output_bits must lie in [1, 30]"));
        }
        if !(self.max_current_scale > 0.0 && self.max_current_scale <= 1.0) {
            return Err(Error::config(format!(
                "max_current_scale must lie in (0, 1], got {}",
                self.max_current_scale
            )));
        }
        let v_cal = self.v_cal();
        if !(v_cal > self.v_th_neuron && v_cal <= self.v_reset) {
            return Err(Error::config(format!(
                "v_cal {v_cal} outside (v_th_neuron, v_reset]"
            )));
        }
        let n = &self.nonideal;
        if n.c_gd_coupling < 0.0 || n.mismatch_sigma_vt < 0.0 || n.gate_line_attenuation < 0.0 {
            return Err(Error::config("non-ideality magnitudes must be >= 0"));
        }
        if n.gate_line_attenuation * (self.m_rows.saturating_sub(1)) as f64 >= 1.0 {
            return Err(Error::config("gate_line_attenuation drives far rows to zero gate voltage"));
        }
        if self.integrator.steps_per_window < 4 {
            return Err(Error::config("integrator needs at least 4 steps per window"));
        }
        if let Some(points) = self.integrator.evaluation.points() {
            if points < 8 {
                return Err(Error::config("tabulated evaluation needs at least 8 points"));
            }
        }
        if let CellEvaluation::Family { levels, .. } = self.integrator.evaluation {
            if levels < 2 {
                return Err(Error::config("family evaluation needs at least 2 weight levels"));
            }
        }
        self.cell.mosfet.validate()?;
        self.cell.rram.with_r0(self.cell.rram.r_on).validate()
    }

    /// Output voltage swing `v_reset − v_th_neuron`.
    pub fn swing(&self) -> f64 {
        self.v_reset - self.v_th_neuron
    }

    pub fn v_cal(&self) -> f64 {
        self.v_cal.unwrap_or(0.5 * (self.v_reset + self.v_th_neuron))
    }

    /// Programmable current window at the calibration point.
    pub fn current_range(&self) -> Result<CurrentRange> {
        cell_current_range(&self.cell, self.v_gate_on, self.v_cal())
    }

    /// Gate voltage seen by row `row`.
    pub fn row_gate_voltage(&self, row: usize) -> f64 {
        self.v_gate_on * (1.0 - self.nonideal.gate_line_attenuation * row as f64)
    }

    /// Whether every cell sees the nominal device and gate voltage, so that
    /// a cell is fully described by its weight.
    pub fn cells_are_uniform(&self) -> bool {
        self.nonideal.gate_line_attenuation == 0.0 && self.nonideal.mismatch_sigma_vt == 0.0
    }
}
