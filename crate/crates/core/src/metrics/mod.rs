//! Error, precision, energy and throughput metrics, Monte Carlo evaluation
//! and design-space sweeps.

pub mod energy;
pub mod error;
pub mod perf;
pub mod run;
pub mod sampler;

pub use energy::{capacitor_energy, column_energy};
pub use error::{compute_error, precision, ErrorStats};
pub use perf::{ops_per_operation, performance_estimate, throughput, ComponentShare, PerfModel, PerformanceEstimate};
pub use run::{
    design_for_precision, evaluate_design_point, run_design_point, sweep, trial_traces, DesignPointResult,
    OutputRecord, SweepGrid, SweepOutcome, SweepReport, SweepVar,
};
pub use sampler::{Sampler, TrialBatch, TrialDraw, WorkloadShape};
