//! Transient simulation of one output column through both phases.
//!
//! Phase I (`0 ≤ t ≤ T`): active cells discharge the precharged load
//! capacitor; each input's falling edge is an integration breakpoint.
//! Phase II (`T ≤ t ≤ 2T`): a replica column of fully-on cells discharges it
//! further while the comparator watches for `V ≤ v_th`. The output pulse is
//! `t_out = T − (t_r − T)`.

use std::sync::Arc;

use super::characteristic::Characteristic;
use super::design::{CellEvaluation, DesignPoint};
use super::encode::EncodedInput;
use super::family::CellFamily;
use crate::device::CurrentSink;
use crate::error::{Error, Result};

/// Timing and threshold parameters shared by every column of a design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnTiming {
    pub t_window: f64,
    pub v_reset: f64,
    pub v_th: f64,
    /// Charge injected onto the column at each falling input edge (C).
    pub coupling_charge: f64,
    pub steps_per_window: usize,
    /// Crossing bisection tolerance as a fraction of T.
    pub crossing_tolerance: f64,
    /// Keep every integrator sample in the trace.
    pub record: bool,
}

impl ColumnTiming {
    pub fn from_design(dp: &DesignPoint) -> Self {
        Self {
            t_window: dp.t_window,
            v_reset: dp.v_reset,
            v_th: dp.v_th_neuron,
            coupling_charge: dp.nonideal.c_gd_coupling * dp.v_gate_on,
            steps_per_window: dp.integrator.steps_per_window,
            crossing_tolerance: dp.integrator.crossing_tolerance,
            record: false,
        }
    }

    pub fn recording(mut self, record: bool) -> Self {
        self.record = record;
        self
    }

    fn voltage_tolerance(&self) -> f64 {
        1e-9 * (self.v_reset - self.v_th)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ColumnFlags {
    /// The capacitor fell below threshold during phase I.
    pub overflow: bool,
    /// No threshold crossing by the end of phase II.
    pub underflow: bool,
}

/// Load-capacitor trajectory of one column.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnTrace {
    /// `(time, v_cap)`; empty unless recording was requested.
    pub samples: Vec<(f64, f64)>,
    /// Index of the first phase-II sample in `samples`.
    pub phase_two_start: usize,
    /// Comparator firing time `t_r`, if any.
    pub crossing_time: Option<f64>,
    pub t_out: f64,
    pub v_phase_one_end: f64,
    pub v_final: f64,
    /// Charge drawn by the array cells in phase I (C).
    pub charge_cells: f64,
    /// Charge removed by gate-drain coupling (C).
    pub charge_coupling: f64,
    /// Charge drawn by the replica in phase II (C).
    pub charge_replica: f64,
    pub capacitance: f64,
    pub flags: ColumnFlags,
}

impl ColumnTrace {
    pub fn total_charge(&self) -> f64 {
        self.charge_cells + self.charge_coupling + self.charge_replica
    }

    /// Total downward excursion of the capacitor over both phases.
    pub fn total_excursion(&self, v_reset: f64) -> f64 {
        v_reset - self.v_final
    }
}

/// Column current as a function of node voltage.
trait Load {
    fn current(&self, v: f64) -> Result<f64>;
}

impl Load for Characteristic {
    #[inline]
    fn current(&self, v: f64) -> Result<f64> {
        Ok(self.eval(v))
    }
}

struct SinkLoad<'a, S: ?Sized>(&'a S);

impl<S: CurrentSink + ?Sized> Load for SinkLoad<'_, S> {
    fn current(&self, v: f64) -> Result<f64> {
        self.0.sink_current(v.max(0.0))
    }
}

/// Phase-I load with cells that switch off one at a time.
trait SwitchedLoad: Load {
    fn switch_off(&mut self, cell: usize);
    fn any_active(&self) -> bool;
}

struct ExactLoad<'a, S> {
    cells: &'a [S],
    active: Vec<bool>,
    n_active: usize,
}

impl<S: CurrentSink> Load for ExactLoad<'_, S> {
    fn current(&self, v: f64) -> Result<f64> {
        let v = v.max(0.0);
        let mut total = 0.0;
        for (cell, _) in self.cells.iter().zip(&self.active).filter(|(_, a)| **a) {
            total += cell.sink_current(v)?;
        }
        Ok(total)
    }
}

impl<S: CurrentSink> SwitchedLoad for ExactLoad<'_, S> {
    fn switch_off(&mut self, cell: usize) {
        if std::mem::replace(&mut self.active[cell], false) {
            self.n_active -= 1;
        }
    }

    fn any_active(&self) -> bool {
        self.n_active > 0
    }
}

struct TabulatedLoad {
    total: Characteristic,
    cells: Vec<Option<Characteristic>>,
    n_active: usize,
}

impl Load for TabulatedLoad {
    #[inline]
    fn current(&self, v: f64) -> Result<f64> {
        Ok(self.total.eval(v))
    }
}

impl SwitchedLoad for TabulatedLoad {
    fn switch_off(&mut self, cell: usize) {
        if let Some(table) = self.cells[cell].take() {
            self.n_active -= 1;
            if self.n_active == 0 {
                self.total = Characteristic::zeros(table.v_max(), table.points())
                    .expect("grid already validated");
            } else {
                self.total.add_scaled(&table, -1.0);
            }
        }
    }

    fn any_active(&self) -> bool {
        self.n_active > 0
    }
}

struct FamilyLoad<'a> {
    total: Characteristic,
    family: &'a CellFamily,
    weights: &'a [f64],
    active: Vec<bool>,
    n_active: usize,
}

impl Load for FamilyLoad<'_> {
    #[inline]
    fn current(&self, v: f64) -> Result<f64> {
        Ok(self.total.eval(v))
    }
}

impl SwitchedLoad for FamilyLoad<'_> {
    fn switch_off(&mut self, cell: usize) {
        if std::mem::replace(&mut self.active[cell], false) {
            self.n_active -= 1;
            if self.n_active == 0 {
                self.total = Characteristic::zeros(self.total.v_max(), self.total.points())
                    .expect("grid already validated");
            } else {
                self.family.accumulate(&mut self.total, self.weights[cell], -1.0);
            }
        }
    }

    fn any_active(&self) -> bool {
        self.n_active > 0
    }
}

/// One classical RK4 step of `dV/dt = −I(V)/C`. Returns the new voltage and
/// the charge removed.
#[inline]
fn rk4_step<L: Load + ?Sized>(load: &L, v: f64, h: f64, capacitance: f64) -> Result<(f64, f64)> {
    let k = h / capacitance;
    let i1 = load.current(v)?;
    let i2 = load.current(v - 0.5 * k * i1)?;
    let i3 = load.current(v - 0.5 * k * i2)?;
    let i4 = load.current(v - k * i3)?;
    let charge = h / 6.0 * (i1 + 2.0 * i2 + 2.0 * i3 + i4);
    if !charge.is_finite() {
        return Err(Error::Numerical(format!("non-finite column current near V={v}")));
    }
    Ok((v - charge / capacitance, charge))
}

/// Phase-II discharge source.
#[derive(Clone)]
pub enum Replica {
    Table(Arc<Characteristic>),
    Sink(Arc<dyn CurrentSink>),
}

impl std::fmt::Debug for Replica {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Replica::Table(t) => f.debug_tuple("Table").field(&t.points()).finish(),
            Replica::Sink(_) => f.write_str("Sink(..)"),
        }
    }
}

/// Simulates columns that share timing, capacitance and replica.
#[derive(Debug, Clone)]
pub struct ColumnSimulator {
    pub timing: ColumnTiming,
    pub capacitance: f64,
    pub evaluation: CellEvaluation,
    replica: Replica,
}

impl ColumnSimulator {
    /// `replica` is the total phase-II sink (all replica cells together).
    pub fn new<R: CurrentSink + 'static>(
        timing: ColumnTiming,
        capacitance: f64,
        evaluation: CellEvaluation,
        replica: R,
    ) -> Result<Self> {
        if !(capacitance > 0.0 && capacitance.is_finite()) {
            return Err(Error::config(format!("capacitance must be > 0, got {capacitance}")));
        }
        if !(timing.v_th < timing.v_reset) || !(timing.t_window > 0.0) || timing.steps_per_window == 0 {
            return Err(Error::config("invalid column timing"));
        }
        let replica = match evaluation.points() {
            None => Replica::Sink(Arc::new(replica)),
            Some(points) => Replica::Table(Arc::new(Characteristic::sample(&replica, timing.v_reset, points)?)),
        };
        Ok(Self {
            timing,
            capacitance,
            evaluation,
            replica,
        })
    }

    fn check_input(&self, cells: usize, input: &EncodedInput) -> Result<()> {
        if cells != input.len() {
            return Err(Error::contract(format!("{cells} cells but {} inputs", input.len())));
        }
        if let Some(d) = input.durations.iter().find(|d| !(0.0..=self.timing.t_window).contains(*d)) {
            return Err(Error::contract(format!("pulse duration {d} outside [0, T]")));
        }
        Ok(())
    }

    /// Runs a column whose cells are nominal devices programmed to
    /// `weights`, using the family's blended characteristics.
    pub fn run_family(&self, family: &CellFamily, weights: &[f64], input: &EncodedInput) -> Result<ColumnTrace> {
        self.check_input(weights.len(), input)?;
        let Some(points) = self.evaluation.points() else {
            return Err(Error::config("family evaluation requires a tabulated grid"));
        };
        let mut total = Characteristic::zeros(self.timing.v_reset, points)?;
        let mut active = vec![false; weights.len()];
        for ((a, &w), &d) in active.iter_mut().zip(weights).zip(&input.durations) {
            if d > 0.0 {
                family.accumulate(&mut total, w, 1.0);
                *a = true;
            }
        }
        let n_active = active.iter().filter(|a| **a).count();
        let load = FamilyLoad {
            total,
            family,
            weights,
            active,
            n_active,
        };
        self.integrate(load, input)
    }

    pub fn run<S: CurrentSink>(&self, cells: &[S], input: &EncodedInput) -> Result<ColumnTrace> {
        self.check_input(cells.len(), input)?;
        match self.evaluation.points() {
            None => {
                let load = ExactLoad {
                    cells,
                    active: vec![true; cells.len()],
                    n_active: cells.len(),
                };
                self.integrate(load, input)
            }
            Some(points) => {
                let v_max = self.timing.v_reset;
                let mut total = Characteristic::zeros(v_max, points)?;
                let mut tables = Vec::with_capacity(cells.len());
                for (cell, &d) in cells.iter().zip(&input.durations) {
                    if d > 0.0 {
                        let t = Characteristic::sample(cell, v_max, points)?;
                        total.add_scaled(&t, 1.0);
                        tables.push(Some(t));
                    } else {
                        tables.push(None);
                    }
                }
                let n_active = tables.iter().filter(|t| t.is_some()).count();
                let load = TabulatedLoad {
                    total,
                    cells: tables,
                    n_active,
                };
                self.integrate(load, input)
            }
        }
    }

    fn integrate<L: SwitchedLoad>(&self, mut load: L, input: &EncodedInput) -> Result<ColumnTrace> {
        let tm = &self.timing;
        let t_win = tm.t_window;
        let c = self.capacitance;
        let steps = tm.steps_per_window;
        let dv_coupling = tm.coupling_charge / c;

        let mut samples = Vec::new();
        let mut v = tm.v_reset;
        if tm.record {
            samples.reserve(2 * steps + input.len() + 4);
            samples.push((0.0, v));
        }

        // Phase I: uniform grid plus every falling edge inside the window.
        let mut breakpoints: Vec<f64> = (0..=steps).map(|k| t_win * k as f64 / steps as f64).collect();
        breakpoints.extend(input.durations.iter().copied().filter(|&d| d > 0.0 && d < t_win));
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();

        let mut order: Vec<usize> = (0..input.len()).collect();
        order.sort_by(|&a, &b| input.durations[a].total_cmp(&input.durations[b]));
        let mut next = 0;
        let mut charge_cells = 0.0;
        let mut charge_coupling = 0.0;

        let mut fall_until = |t: f64, load: &mut L, v: &mut f64, next: &mut usize| {
            let mut fell = false;
            while *next < order.len() && input.durations[order[*next]] <= t {
                let cell = order[*next];
                load.switch_off(cell);
                if input.durations[cell] > 0.0 && dv_coupling > 0.0 {
                    *v -= dv_coupling;
                    charge_coupling += tm.coupling_charge;
                    fell = true;
                }
                *next += 1;
            }
            fell
        };

        for w in breakpoints.windows(2) {
            let (t0, t1) = (w[0], w[1]);
            if fall_until(t0, &mut load, &mut v, &mut next) && tm.record {
                samples.push((t0, v));
            }
            if load.any_active() {
                let (v_new, q) = rk4_step(&load, v, t1 - t0, c)?;
                v = v_new;
                charge_cells += q;
            }
            if tm.record {
                samples.push((t1, v));
            }
        }
        if fall_until(t_win, &mut load, &mut v, &mut next) && tm.record {
            samples.push((t_win, v));
        }
        let v_phase_one_end = v;
        let phase_two_start = samples.len();

        // Phase II: replica discharge with the comparator armed.
        let mut flags = ColumnFlags::default();
        let tol_v = tm.voltage_tolerance();
        let mut crossing = None;
        if v < tm.v_th - tol_v {
            flags.overflow = true;
            crossing = Some(t_win);
        } else if v <= tm.v_th + tol_v {
            crossing = Some(t_win);
        }
        let replica: &dyn Load = match &self.replica {
            Replica::Table(t) => t.as_ref(),
            Replica::Sink(s) => &SinkLoad(s.as_ref()),
        };
        let h = t_win / steps as f64;
        let mut charge_replica = 0.0;
        for k in 0..steps {
            let t0 = t_win + t_win * k as f64 / steps as f64;
            let (v_new, q) = rk4_step(replica, v, h, c)?;
            if crossing.is_none() && v_new <= tm.v_th {
                crossing = Some(t0 + self.locate_crossing(replica, v, h)?);
            }
            v = v_new;
            charge_replica += q;
            if tm.record {
                samples.push((t0 + h, v));
            }
        }
        if crossing.is_none() && v <= tm.v_th + tol_v {
            crossing = Some(2.0 * t_win);
        }
        let t_out = match crossing {
            Some(t_r) => (2.0 * t_win - t_r).clamp(0.0, t_win),
            None => {
                flags.underflow = true;
                0.0
            }
        };

        Ok(ColumnTrace {
            samples,
            phase_two_start,
            crossing_time: crossing,
            t_out,
            v_phase_one_end,
            v_final: v,
            charge_cells,
            charge_coupling,
            charge_replica,
            capacitance: c,
            flags,
        })
    }

    /// Bisects the sub-step length at which the RK4 update from `v` reaches
    /// the threshold.
    fn locate_crossing(&self, load: &dyn Load, v: f64, h: f64) -> Result<f64> {
        let tol = self.timing.crossing_tolerance * self.timing.t_window;
        let (mut lo, mut hi) = (0.0, h);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            let (v_mid, _) = rk4_step(load, v, mid, self.capacitance)?;
            if v_mid <= self.timing.v_th {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Convenience wrapper: builds a simulator for one column and runs it.
pub fn simulate_column<S: CurrentSink, R: CurrentSink + 'static>(
    cells: &[S],
    input: &EncodedInput,
    replica: R,
    timing: &ColumnTiming,
    capacitance: f64,
    evaluation: CellEvaluation,
) -> Result<ColumnTrace> {
    ColumnSimulator::new(*timing, capacitance, evaluation, replica)?.run(cells, input)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::{ConstantSink, Scaled};
    use crate::engine::encode::encode_inputs;

    const T: f64 = 16e-9;
    const I: f64 = 100e-9;

    fn timing() -> ColumnTiming {
        ColumnTiming {
            t_window: T,
            v_reset: 0.9,
            v_th: 0.7,
            coupling_charge: 0.0,
            steps_per_window: 1024,
            crossing_tolerance: 1e-10,
            record: true,
        }
    }

    /// Capacitor sized for `m` ideal sinks of current `I` over one window.
    fn cap(m: usize) -> f64 {
        m as f64 * I * T / 0.2
    }

    fn replica(m: usize) -> Scaled<ConstantSink> {
        Scaled {
            inner: ConstantSink(I),
            factor: m as f64,
        }
    }

    #[test]
    fn single_constant_cell_matches_closed_form() {
        let m = 4;
        let cells = vec![ConstantSink(I), ConstantSink(0.0), ConstantSink(0.0), ConstantSink(0.0)];
        let x = [0.37, 0.0, 0.0, 0.0];
        let enc = encode_inputs(&x, T).unwrap();
        for eval in [CellEvaluation::Exact, CellEvaluation::Tabulated { points: 33 }] {
            let tr = simulate_column(&cells, &enc, replica(m), &timing(), cap(m), eval).unwrap();
            let dv = 0.9 - tr.v_phase_one_end;
            let want = I * 0.37 * T / cap(m);
            assert!((dv - want).abs() < 1e-12 * want.max(1.0), "{eval:?}: {dv} vs {want}");
        }
    }

    #[test]
    fn zero_inputs_give_zero_output() {
        let m = 8;
        let cells = vec![ConstantSink(I); m];
        let enc = encode_inputs(&vec![0.0; m], T).unwrap();
        let tr = simulate_column(&cells, &enc, replica(m), &timing(), cap(m), CellEvaluation::Exact).unwrap();
        assert_eq!(tr.v_phase_one_end, 0.9);
        assert!(tr.t_out.abs() < 1e-3 * T);
        let tr_time = tr.crossing_time.unwrap_or(2.0 * T);
        assert!((tr_time - 2.0 * T).abs() < 1e-3 * T);
    }

    #[test]
    fn full_inputs_full_weights_give_full_output() {
        let m = 8;
        let cells = vec![ConstantSink(I); m];
        let enc = encode_inputs(&vec![1.0; m], T).unwrap();
        let tr = simulate_column(&cells, &enc, replica(m), &timing(), cap(m), CellEvaluation::Exact).unwrap();
        assert!((tr.t_out - T).abs() < 1e-3 * T);
        assert!(!tr.flags.overflow);
    }

    #[test]
    fn trace_is_monotone_within_phases() {
        let m = 5;
        let cells = vec![ConstantSink(I); m];
        let enc = encode_inputs(&[0.1, 0.5, 0.5, 0.9, 1.0], T).unwrap();
        let tm = ColumnTiming {
            coupling_charge: 1e-17,
            ..timing()
        };
        let tr = simulate_column(&cells, &enc, replica(m), &tm, cap(m), CellEvaluation::Exact).unwrap();
        assert_eq!(tr.samples[0], (0.0, 0.9));
        for w in tr.samples.windows(2) {
            assert!(w[1].1 <= w[0].1);
            assert!(w[1].0 >= w[0].0);
        }
        assert!(tr.samples[tr.phase_two_start].0 > T);
        // five falling edges inject charge
        assert!((tr.charge_coupling - 5e-17).abs() < 1e-30);
    }

    #[test]
    fn charge_balances_voltage_drop() {
        let m = 6;
        let cells = vec![ConstantSink(I); m];
        let enc = encode_inputs(&[0.2, 0.4, 0.6, 0.8, 1.0, 0.0], T).unwrap();
        let tr = simulate_column(&cells, &enc, replica(m), &timing(), cap(m), CellEvaluation::Exact).unwrap();
        let want = cap(m) * (0.9 - tr.v_final);
        assert!(((tr.total_charge() - want) / want).abs() < 1e-12);
    }

    #[test]
    fn overflow_when_undersized() {
        let m = 4;
        let cells = vec![ConstantSink(I); m];
        let enc = encode_inputs(&vec![1.0; m], T).unwrap();
        let tr = simulate_column(&cells, &enc, replica(m), &timing(), 0.5 * cap(m), CellEvaluation::Exact).unwrap();
        assert!(tr.flags.overflow);
        assert_eq!(tr.t_out, T);
    }

    #[test]
    fn mismatched_lengths_rejected() {
        let enc = encode_inputs(&[0.5, 0.5], T).unwrap();
        let r = simulate_column(&[ConstantSink(I)], &enc, replica(1), &timing(), cap(1), CellEvaluation::Exact);
        assert!(matches!(r, Err(Error::Contract(_))));
    }
}
