//! Monte Carlo evaluation of design points and grid sweeps.

use serde::{Deserialize, Serialize};

use super::energy::column_energy;
use super::error::{compute_error, precision, ErrorStats};
use super::perf::{ops_per_operation, throughput, PerfModel};
use super::sampler::{TrialBatch, TrialDraw, WorkloadShape};
use crate::engine::{ColumnPerturbation, ColumnTrace, DesignPoint, VmmEngine};
use crate::error::{Error, Result};
use crate::par::{map_range, Execution};

/// Aggregate metrics of one design point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct SweepReport {
    pub m_rows: usize,
    pub n_cols: usize,
    pub v_gate_on: f64,
    pub t_window: f64,
    pub l_gate: f64,
    pub beta: f64,
    pub r_on: f64,
    pub r_off: f64,
    pub swing: f64,
    pub max_current_scale: f64,
    pub topology: String,
    pub n_trials: usize,
    pub e_out_max: f64,
    pub e_out_p99: f64,
    pub e_out_mean: f64,
    pub p_out: u32,
    /// Worst error of single columns against `a·y·T / K`, i.e. without the
    /// differential cancellation of the additive term.
    pub e_single_max: f64,
    pub i_min: f64,
    pub i_max: f64,
    pub dynamic_range: f64,
    pub capacitance: f64,
    /// Mean load-capacitor energy of one operation over all columns (J).
    pub e_cl_total: f64,
    pub throughput: f64,
    pub energy_efficiency: f64,
    /// Physical columns that crossed threshold in phase I.
    pub overflow_count: usize,
    /// Physical columns that never crossed threshold.
    pub underflow_count: usize,
}

/// One signed output of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub trial: usize,
    pub column: usize,
    pub t_out_sim: f64,
    pub t_out_ideal: f64,
    pub err: f64,
    pub code: u32,
    pub overflow: bool,
    pub underflow: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignPointResult {
    pub report: SweepReport,
    pub records: Vec<OutputRecord>,
}

struct TrialOutcome {
    records: Vec<OutputRecord>,
    single_errors: Vec<f64>,
    energy: f64,
    overflow: usize,
    underflow: usize,
    traces: Vec<ColumnTrace>,
}

fn workload_shape(dp: &DesignPoint) -> WorkloadShape {
    WorkloadShape {
        m_rows: dp.m_rows,
        n_cols: dp.n_cols,
        // The dot products the array is sized for: sub-weights are limited to
        // the reduced full scale.
        weight_scale: dp.max_current_scale,
        mismatch_sigma_vt: dp.nonideal.mismatch_sigma_vt,
        programming_error: dp.nonideal.programming_error.is_some(),
    }
}

fn perturbation(draw: &TrialDraw, physical: usize) -> ColumnPerturbation {
    ColumnPerturbation {
        vt_offsets: draw.vt_offsets.get(physical).cloned().unwrap_or_default(),
        programming_draws: draw.programming.get(physical).cloned().unwrap_or_default(),
    }
}

fn run_trial(engine: &VmmEngine, batch: &TrialBatch, trial: usize, keep_traces: bool) -> Result<TrialOutcome> {
    let dp = &engine.design;
    let draw = batch.draw(trial, &workload_shape(dp))?;
    let input = engine.encode(&draw.x)?;
    let t_win = dp.t_window;
    let k = dp.max_current_scale;
    let m = dp.m_rows as f64;
    let gain = engine.range.gain();
    let target = |w: &[f64]| t_win * gain * w.iter().zip(&draw.x).map(|(w, x)| w * x).sum::<f64>() / (m * k);

    let mut out = TrialOutcome {
        records: Vec::with_capacity(dp.n_cols),
        single_errors: Vec::with_capacity(2 * dp.n_cols),
        energy: 0.0,
        overflow: 0,
        underflow: 0,
        traces: Vec::new(),
    };
    for j in 0..dp.n_cols {
        let (wp, wn) = (&draw.w_pos[j], &draw.w_neg[j]);
        let pos = engine.build_column(wp, &perturbation(&draw, 2 * j))?;
        let neg = engine.build_column(wn, &perturbation(&draw, 2 * j + 1))?;
        let (res, tp, tn) = engine.run_pair(&pos, &neg, &input)?;
        let ideal = engine.ideal_differential(wp, wn, &draw.x)?;
        out.records.push(OutputRecord {
            trial,
            column: j,
            t_out_sim: res.signed,
            t_out_ideal: ideal,
            err: compute_error(res.signed, ideal, t_win),
            code: engine.quantize(res.relu),
            overflow: res.any_overflow(),
            underflow: res.any_underflow(),
        });
        out.single_errors.push(compute_error(tp.t_out, target(wp), t_win));
        out.single_errors.push(compute_error(tn.t_out, target(wn), t_win));
        for t in [&tp, &tn] {
            out.energy += column_energy(t.capacitance, dp.v_reset, t.total_excursion(dp.v_reset));
            out.overflow += usize::from(t.flags.overflow);
            out.underflow += usize::from(t.flags.underflow);
        }
        if keep_traces {
            out.traces.push(tp);
            out.traces.push(tn);
        }
    }
    Ok(out)
}

/// Runs a batch of random trials on one design point and keeps every output.
pub fn evaluate_design_point(
    dp: &DesignPoint,
    batch: &TrialBatch,
    perf: &PerfModel,
    exec: Execution,
) -> Result<DesignPointResult> {
    batch.validate()?;
    perf.validate()?;
    let engine = VmmEngine::new(*dp)?;
    let outcomes = map_range(exec, batch.n_trials, |t| run_trial(&engine, batch, t, false));
    let outcomes: Vec<TrialOutcome> = outcomes.into_iter().collect::<Result<_>>()?;

    let records: Vec<OutputRecord> = outcomes.iter().flat_map(|o| o.records.iter().copied()).collect();
    let errors: Vec<f64> = records.iter().map(|r| r.err).collect();
    let single: Vec<f64> = outcomes.iter().flat_map(|o| o.single_errors.iter().copied()).collect();
    let stats = ErrorStats::from_errors(&errors);
    let e_cl = outcomes.iter().map(|o| o.energy).sum::<f64>() / batch.n_trials as f64;
    let c = dp.cell;

    let report = SweepReport {
        m_rows: dp.m_rows,
        n_cols: dp.n_cols,
        v_gate_on: dp.v_gate_on,
        t_window: dp.t_window,
        l_gate: c.mosfet.l_gate,
        beta: c.rram.beta,
        r_on: c.rram.r_on,
        r_off: c.rram.r_off,
        swing: dp.swing(),
        max_current_scale: dp.max_current_scale,
        topology: c.topology.name().to_string(),
        n_trials: batch.n_trials,
        e_out_max: stats.max,
        e_out_p99: stats.p99,
        e_out_mean: stats.mean,
        p_out: precision(stats.max, dp.output_bits.max(16)),
        e_single_max: ErrorStats::from_errors(&single).max,
        i_min: engine.range.i_min,
        i_max: engine.range.i_max,
        dynamic_range: engine.range.dynamic_range(),
        capacitance: engine.capacitance,
        e_cl_total: e_cl,
        throughput: throughput(dp, perf),
        energy_efficiency: ops_per_operation(dp) / (e_cl + perf.io_energy(dp)),
        overflow_count: outcomes.iter().map(|o| o.overflow).sum(),
        underflow_count: outcomes.iter().map(|o| o.underflow).sum(),
    };
    Ok(DesignPointResult { report, records })
}

pub fn run_design_point(dp: &DesignPoint, batch: &TrialBatch, perf: &PerfModel, exec: Execution) -> Result<SweepReport> {
    Ok(evaluate_design_point(dp, batch, perf, exec)?.report)
}

/// Recorded capacitor trajectories of every physical column of one trial,
/// ordered `(2j, 2j + 1)` = (positive, negative) of output `j`.
pub fn trial_traces(dp: &DesignPoint, batch: &TrialBatch, trial: usize) -> Result<Vec<ColumnTrace>> {
    batch.validate()?;
    if trial >= batch.n_trials {
        return Err(Error::contract(format!("trial {trial} outside batch of {}", batch.n_trials)));
    }
    let mut engine = VmmEngine::new(*dp)?;
    engine.set_recording(true);
    Ok(run_trial(&engine, batch, trial, true)?.traces)
}

/// A design parameter that a sweep can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepVar {
    VGate,
    /// Gate drive together with its paired RRAM window.
    Drive,
    TWindow,
    LGate,
    Beta,
    ROn,
    ROff,
    /// Square array: sets both `m_rows` and `n_cols`.
    Size,
    /// `v_reset − v_th_neuron`, moving the neuron threshold.
    Swing,
    MaxCurrentScale,
    /// Sets `max_current_scale = M^(p − 1)` for the current array size.
    CurrentExponent,
}

impl SweepVar {
    pub const ALL: [SweepVar; 11] = [
        SweepVar::VGate,
        SweepVar::Drive,
        SweepVar::TWindow,
        SweepVar::LGate,
        SweepVar::Beta,
        SweepVar::ROn,
        SweepVar::ROff,
        SweepVar::Size,
        SweepVar::Swing,
        SweepVar::MaxCurrentScale,
        SweepVar::CurrentExponent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepVar::VGate => "v_gate_on",
            SweepVar::Drive => "drive",
            SweepVar::TWindow => "t_window",
            SweepVar::LGate => "l_gate",
            SweepVar::Beta => "beta",
            SweepVar::ROn => "r_on",
            SweepVar::ROff => "r_off",
            SweepVar::Size => "size",
            SweepVar::Swing => "swing",
            SweepVar::MaxCurrentScale => "max_current_scale",
            SweepVar::CurrentExponent => "current_exponent",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == s)
    }

    /// Applies `value` to `dp`. Sizes are rounded to the nearest integer.
    pub fn apply(self, dp: &mut DesignPoint, value: f64) {
        match self {
            SweepVar::VGate => dp.v_gate_on = value,
            SweepVar::Drive => crate::presets::apply_drive(dp, value),
            SweepVar::TWindow => dp.t_window = value,
            SweepVar::LGate => dp.cell.mosfet.l_gate = value,
            SweepVar::Beta => dp.cell.rram.beta = value,
            SweepVar::ROn => dp.cell.rram.r_on = value,
            SweepVar::ROff => dp.cell.rram.r_off = value,
            SweepVar::Size => {
                let n = value.round().max(0.0) as usize;
                dp.m_rows = n;
                dp.n_cols = n;
            }
            SweepVar::Swing => dp.v_th_neuron = dp.v_reset - value,
            SweepVar::MaxCurrentScale => dp.max_current_scale = value,
            SweepVar::CurrentExponent => dp.max_current_scale = (dp.m_rows as f64).powf(value - 1.0),
        }
    }
}

/// Cartesian grid of parameter values. Axes are applied in order, so an
/// exponent axis listed after a size axis sees the swept size.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepGrid {
    pub axes: Vec<(SweepVar, Vec<f64>)>,
}

impl SweepGrid {
    pub fn len(&self) -> usize {
        if self.axes.is_empty() {
            0
        } else {
            self.axes.iter().map(|(_, v)| v.len()).product()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every grid point as `(var, value)` assignments, last axis fastest.
    pub fn points(&self) -> Vec<Vec<(SweepVar, f64)>> {
        let mut out: Vec<Vec<(SweepVar, f64)>> = vec![vec![]];
        if self.is_empty() {
            return Vec::new();
        }
        for (var, values) in &self.axes {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    values.iter().map(move |&v| {
                        let mut p = prefix.clone();
                        p.push((*var, v));
                        p
                    })
                })
                .collect();
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub assignments: Vec<(SweepVar, f64)>,
    pub design: DesignPoint,
    pub result: std::result::Result<SweepReport, String>,
}

/// Evaluates every grid point; a failing point is reported, not fatal.
pub fn sweep(
    base: &DesignPoint,
    grid: &SweepGrid,
    batch: &TrialBatch,
    perf: &PerfModel,
    exec: Execution,
) -> Result<Vec<SweepOutcome>> {
    if grid.is_empty() {
        return Err(Error::config("sweep grid is empty"));
    }
    Ok(grid
        .points()
        .into_iter()
        .map(|assignments| {
            let mut dp = *base;
            for &(var, value) in &assignments {
                var.apply(&mut dp, value);
            }
            let result = run_design_point(&dp, batch, perf, exec).map_err(|e| e.to_string());
            SweepOutcome {
                assignments,
                design: dp,
                result,
            }
        })
        .collect())
}

/// Design for a target output precision: the window doubles per extra bit
/// from `base.t_window` at the converters' reference precision.
pub fn design_for_precision(base: &DesignPoint, perf: &PerfModel, bits: u32) -> DesignPoint {
    let mut dp = *base;
    dp.output_bits = bits;
    dp.t_window = base.t_window * 2f64.powi(bits as i32 - perf.reference_bits as i32);
    dp
}
