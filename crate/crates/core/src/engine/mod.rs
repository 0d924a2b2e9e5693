//! The two-phase time-domain VMM protocol.

pub mod capacitor;
pub mod characteristic;
pub mod column;
pub mod design;
pub mod encode;
pub mod family;
pub mod ideal;
pub mod quantize;
pub mod vmm;

pub use capacitor::{capacitance_for, size_capacitor};
pub use characteristic::Characteristic;
pub use column::{simulate_column, ColumnFlags, ColumnSimulator, ColumnTiming, ColumnTrace};
pub use design::{CellEvaluation, DesignPoint, IntegratorSettings, Nonidealities};
pub use encode::{encode_inputs, EncodedInput};
pub use family::CellFamily;
pub use ideal::{ideal_differential, ideal_output, ideal_output_scaled};
pub use quantize::quantize_output;
pub use vmm::{differential_vmm, ColumnPerturbation, DifferentialOutput, ProgrammedColumn, VmmEngine};
