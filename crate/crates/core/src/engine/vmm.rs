//! A programmed VMM array: device window, load capacitor, replica source and
//! the per-column simulations built on them.

use std::sync::Arc;

use super::capacitor::size_capacitor;
use super::column::{ColumnFlags, ColumnSimulator, ColumnTiming, ColumnTrace};
use super::design::{CellEvaluation, DesignPoint};
use super::family::CellFamily;
use super::encode::{encode_inputs, EncodedInput};
use super::ideal::{ideal_differential, ideal_output_scaled};
use super::quantize::quantize_output;
use crate::device::{program_weight_in, BiasedCell, CurrentRange, CurrentSink, Scaled};
use crate::error::{Error, Result};
use crate::par::Execution;

/// Per-cell deviations applied to one column when it is built. Empty vectors
/// mean "none".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ColumnPerturbation {
    /// Threshold offsets (V), one per row.
    pub vt_offsets: Vec<f64>,
    /// Programming-error draws in LSB, each in `[-0.5, 0.5]`.
    pub programming_draws: Vec<f64>,
}

/// Result of one signed output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DifferentialOutput {
    pub t_pos: f64,
    pub t_neg: f64,
    /// `t_pos − t_neg`.
    pub signed: f64,
    /// `max(signed, 0)`: the `V⁺ · ¬V⁻` gate output.
    pub relu: f64,
    pub flags_pos: ColumnFlags,
    pub flags_neg: ColumnFlags,
}

impl DifferentialOutput {
    pub fn any_overflow(&self) -> bool {
        self.flags_pos.overflow || self.flags_neg.overflow
    }

    pub fn any_underflow(&self) -> bool {
        self.flags_pos.underflow || self.flags_neg.underflow
    }
}

/// A physical column ready to simulate.
#[derive(Debug, Clone, PartialEq)]
pub enum ProgrammedColumn {
    /// Individually programmed cells.
    Cells(Vec<BiasedCell>),
    /// Nominal cells described by their effective weights, evaluated
    /// through the engine's cell family.
    Weights(Vec<f64>),
}

#[derive(Debug, Clone)]
pub struct VmmEngine {
    pub design: DesignPoint,
    pub range: CurrentRange,
    pub capacitance: f64,
    simulator: ColumnSimulator,
    family: Option<Arc<CellFamily>>,
}

impl VmmEngine {
    /// Builds the array with the device window at the calibration point and
    /// a replica of `M` cells at `r_on` for phase II.
    pub fn new(design: DesignPoint) -> Result<Self> {
        design.validate()?;
        let range = design.current_range()?;
        let replica = BiasedCell {
            cell: design.cell.with_r0(design.cell.rram.r_on),
            v_gate: design.v_gate_on,
        };
        let mut engine = Self::with_replica(design, range, replica)?;
        if let CellEvaluation::Family { points, levels } = design.integrator.evaluation {
            if design.cells_are_uniform() {
                engine.family = Some(Arc::new(CellFamily::build(
                    &design.cell,
                    &range,
                    design.v_gate_on,
                    design.v_cal(),
                    design.v_reset,
                    points,
                    levels,
                    Execution::default(),
                )?));
            }
        }
        Ok(engine)
    }

    /// Builds the array around an arbitrary unit replica sink, e.g. an ideal
    /// current source. The phase-II current is `K · M` copies of `unit`.
    pub fn with_replica<R: CurrentSink + 'static>(design: DesignPoint, range: CurrentRange, unit: R) -> Result<Self> {
        let capacitance = size_capacitor(&design, range.i_max)?;
        let replica = Scaled {
            inner: unit,
            factor: design.max_current_scale * design.m_rows as f64,
        };
        let simulator = ColumnSimulator::new(
            ColumnTiming::from_design(&design),
            capacitance,
            design.integrator.evaluation,
            replica,
        )?;
        Ok(Self {
            design,
            range,
            capacitance,
            simulator,
            family: None,
        })
    }

    pub fn encode(&self, x: &[f64]) -> Result<EncodedInput> {
        if x.len() != self.design.m_rows {
            return Err(Error::contract(format!(
                "expected {} inputs, got {}",
                self.design.m_rows,
                x.len()
            )));
        }
        encode_inputs(x, self.design.t_window)
    }

    /// Programs one physical column for the given weights.
    pub fn program_column(&self, weights: &[f64], perturbation: &ColumnPerturbation) -> Result<Vec<BiasedCell>> {
        let dp = &self.design;
        if weights.len() != dp.m_rows {
            return Err(Error::contract(format!("expected {} weights, got {}", dp.m_rows, weights.len())));
        }
        let v_cal = dp.v_cal();
        weights
            .iter()
            .enumerate()
            .map(|(row, &w)| {
                let error = match (dp.nonideal.programming_error, perturbation.programming_draws.get(row)) {
                    (Some(knob), Some(&draw)) => Some((knob, draw)),
                    _ => None,
                };
                // Weights are written against the nominal device; line drop
                // and mismatch are invisible to the programmer.
                let rram = program_weight_in(w, &self.range, &dp.cell, dp.v_gate_on, v_cal, error)?;
                let mut cell = dp.cell;
                cell.rram = rram;
                if let Some(&dv) = perturbation.vt_offsets.get(row) {
                    cell.mosfet = cell.mosfet.with_threshold_offset(dv);
                }
                Ok(BiasedCell {
                    cell,
                    v_gate: dp.row_gate_voltage(row),
                })
            })
            .collect()
    }

    /// Programs one physical column, using the cell family when every cell
    /// is a nominal device.
    pub fn build_column(&self, weights: &[f64], perturbation: &ColumnPerturbation) -> Result<ProgrammedColumn> {
        let Some(_) = &self.family else {
            return Ok(ProgrammedColumn::Cells(self.program_column(weights, perturbation)?));
        };
        if weights.len() != self.design.m_rows {
            return Err(Error::contract(format!(
                "expected {} weights, got {}",
                self.design.m_rows,
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(0.0..=1.0).contains(*w)) {
            return Err(Error::contract(format!("weight must lie in [0, 1], got {w}")));
        }
        let knob = self.design.nonideal.programming_error;
        let effective = weights
            .iter()
            .enumerate()
            .map(|(row, &w)| match (knob, perturbation.programming_draws.get(row)) {
                // A write error shifts the current by a fraction of the window,
                // i.e. the weight by the same amount.
                (Some(k), Some(&draw)) => (w + draw.clamp(-0.5, 0.5) * k.lsb()).clamp(0.0, 1.0),
                _ => w,
            })
            .collect();
        Ok(ProgrammedColumn::Weights(effective))
    }

    pub fn run_column(&self, column: &ProgrammedColumn, input: &EncodedInput) -> Result<ColumnTrace> {
        match (column, &self.family) {
            (ProgrammedColumn::Cells(cells), _) => self.simulator.run(cells, input),
            (ProgrammedColumn::Weights(w), Some(family)) => self.simulator.run_family(family, w, input),
            (ProgrammedColumn::Weights(_), None) => {
                Err(Error::contract("weight-only column on an engine without a cell family"))
            }
        }
    }

    /// Keep full capacitor trajectories in every trace.
    pub fn set_recording(&mut self, on: bool) {
        self.simulator.timing.record = on;
    }

    pub fn simulator(&self) -> &ColumnSimulator {
        &self.simulator
    }

    pub fn simulate<S: CurrentSink>(&self, cells: &[S], input: &EncodedInput) -> Result<ColumnTrace> {
        self.simulator.run(cells, input)
    }

    /// Simulates a differential pair of columns.
    pub fn simulate_pair<S: CurrentSink>(
        &self,
        positive: &[S],
        negative: &[S],
        input: &EncodedInput,
    ) -> Result<(DifferentialOutput, ColumnTrace, ColumnTrace)> {
        let pos = self.simulate(positive, input)?;
        let neg = self.simulate(negative, input)?;
        Ok(combine(pos, neg))
    }

    /// Simulates a differential pair of programmed columns.
    pub fn run_pair(
        &self,
        positive: &ProgrammedColumn,
        negative: &ProgrammedColumn,
        input: &EncodedInput,
    ) -> Result<(DifferentialOutput, ColumnTrace, ColumnTrace)> {
        let pos = self.run_column(positive, input)?;
        let neg = self.run_column(negative, input)?;
        Ok(combine(pos, neg))
    }

    /// Ideal single-column output for this design.
    pub fn ideal_single(&self, weights: &[f64], x: &[f64]) -> Result<f64> {
        ideal_output_scaled(weights, x, &self.range, self.design.t_window, self.design.max_current_scale)
    }

    pub fn ideal_differential(&self, w_pos: &[f64], w_neg: &[f64], x: &[f64]) -> Result<f64> {
        ideal_differential(w_pos, w_neg, x, &self.range, self.design.t_window, self.design.max_current_scale)
    }

    /// TDC code for a (non-negative) output pulse.
    pub fn quantize(&self, t_out: f64) -> u32 {
        quantize_output(t_out, self.range.gain(), self.design.t_window, self.design.output_bits)
    }
}

fn combine(pos: ColumnTrace, neg: ColumnTrace) -> (DifferentialOutput, ColumnTrace, ColumnTrace) {
    let signed = pos.t_out - neg.t_out;
    let out = DifferentialOutput {
        t_pos: pos.t_out,
        t_neg: neg.t_out,
        signed,
        relu: signed.max(0.0),
        flags_pos: pos.flags,
        flags_neg: neg.flags,
    };
    (out, pos, neg)
}

/// Programs and simulates one differential output from scratch.
pub fn differential_vmm(w_pos: &[f64], w_neg: &[f64], x: &[f64], dp: &DesignPoint) -> Result<DifferentialOutput> {
    let engine = VmmEngine::new(*dp)?;
    let input = engine.encode(x)?;
    let none = ColumnPerturbation::default();
    let pos = engine.build_column(w_pos, &none)?;
    let neg = engine.build_column(w_neg, &none)?;
    Ok(engine.run_pair(&pos, &neg, &input)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> DesignPoint {
        DesignPoint {
            m_rows: 4,
            n_cols: 1,
            ..Default::default()
        }
    }

    #[test]
    fn identical_columns_cancel() {
        let dp = small();
        let w = [0.3, 0.8, 0.1, 0.5];
        let out = differential_vmm(&w, &w, &[0.9, 0.2, 0.6, 1.0], &dp).unwrap();
        assert!(out.signed.abs() < 2e-3 * dp.t_window);
    }

    #[test]
    fn zero_input_gives_exact_zero() {
        let dp = small();
        let out = differential_vmm(&[1.0, 0.0, 0.5, 0.5], &[0.0, 1.0, 0.2, 0.9], &[0.0; 4], &dp).unwrap();
        assert_eq!(out.signed, 0.0);
        assert_eq!(out.relu, 0.0);
    }

    #[test]
    fn relu_clamps_negative_results() {
        let dp = small();
        let out = differential_vmm(&[0.0; 4], &[1.0; 4], &[1.0; 4], &dp).unwrap();
        assert!(out.signed < 0.0);
        assert_eq!(out.relu, 0.0);
    }

    #[test]
    fn wrong_sizes_rejected() {
        let engine = VmmEngine::new(small()).unwrap();
        assert!(engine.encode(&[0.5; 3]).is_err());
        assert!(engine.program_column(&[0.5; 5], &ColumnPerturbation::default()).is_err());
        assert!(engine.build_column(&[0.5; 5], &ColumnPerturbation::default()).is_err());
        assert!(engine.build_column(&[0.5, 0.5, 0.5, 1.5], &ColumnPerturbation::default()).is_err());
    }

    #[test]
    fn family_matches_per_cell_tables() {
        let dp = small();
        let per_cell = DesignPoint {
            integrator: crate::engine::IntegratorSettings {
                evaluation: CellEvaluation::Tabulated { points: 257 },
                ..Default::default()
            },
            ..dp
        };
        let w = [0.13, 0.92, 0.47, 0.0];
        let x = [0.8, 0.35, 1.0, 0.6];
        let a = VmmEngine::new(dp).unwrap();
        let b = VmmEngine::new(per_cell).unwrap();
        let none = ColumnPerturbation::default();
        let ca = a.build_column(&w, &none).unwrap();
        assert!(matches!(ca, ProgrammedColumn::Weights(_)));
        let cb = b.build_column(&w, &none).unwrap();
        assert!(matches!(cb, ProgrammedColumn::Cells(_)));
        let ta = a.run_column(&ca, &a.encode(&x).unwrap()).unwrap().t_out;
        let tb = b.run_column(&cb, &b.encode(&x).unwrap()).unwrap().t_out;
        assert!((ta - tb).abs() < 1e-5 * dp.t_window, "{ta} vs {tb}");
    }

    #[test]
    fn write_error_shifts_effective_weight() {
        let dp = DesignPoint {
            nonideal: crate::engine::Nonidealities {
                programming_error: Some(crate::device::ProgrammingError { bits: 3 }),
                ..Default::default()
            },
            ..small()
        };
        let engine = VmmEngine::new(dp).unwrap();
        let p = ColumnPerturbation {
            vt_offsets: vec![],
            programming_draws: vec![0.5, -0.5, 0.2, 0.5],
        };
        let col = engine.build_column(&[0.5, 0.0, 0.5, 1.0], &p).unwrap();
        assert_eq!(col, ProgrammedColumn::Weights(vec![0.5625, 0.0, 0.525, 1.0]));
    }
}
