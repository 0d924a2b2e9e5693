//! Run configuration: INI-style sections of `key = value` pairs.
//!
//! ```text
//! preset = table1
//!
//! [design]
//! m_rows = 16
//! t_window = 16ns
//!
//! [sweep]
//! t_window = 16ns, 32ns, 64ns
//! ```
//!
//! Values accept SI prefixes and units. Unknown sections and keys are
//! rejected. A preset, if named, provides the starting point and its sweep
//! grid; every key in the file then overrides it.

use std::fmt;
use std::path::Path;

use ini::Ini;
use sha2::{Digest, Sha256};

use tdvmm::device::{CellTopology, ProgrammingError};
use tdvmm::engine::{CellEvaluation, DesignPoint};
use tdvmm::metrics::{PerfModel, Sampler, SweepGrid, SweepVar, TrialBatch};
use tdvmm::presets;

use crate::si;

/// Raised for anything wrong with the configuration itself.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

type Result<T> = std::result::Result<T, ConfigError>;

fn err(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalKind {
    Exact,
    Tabulated,
    Family,
}

impl EvalKind {
    fn name(self) -> &'static str {
        match self {
            EvalKind::Exact => "exact",
            EvalKind::Tabulated => "tabulated",
            EvalKind::Family => "family",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalSettings {
    pub kind: EvalKind,
    pub points: usize,
    pub levels: usize,
}

impl EvalSettings {
    fn from_evaluation(e: CellEvaluation) -> Self {
        match e {
            CellEvaluation::Exact => Self {
                kind: EvalKind::Exact,
                points: 257,
                levels: 257,
            },
            CellEvaluation::Tabulated { points } => Self {
                kind: EvalKind::Tabulated,
                points,
                levels: 257,
            },
            CellEvaluation::Family { points, levels } => Self {
                kind: EvalKind::Family,
                points,
                levels,
            },
        }
    }

    fn evaluation(&self) -> CellEvaluation {
        match self.kind {
            EvalKind::Exact => CellEvaluation::Exact,
            EvalKind::Tabulated => CellEvaluation::Tabulated { points: self.points },
            EvalKind::Family => CellEvaluation::Family {
                points: self.points,
                levels: self.levels,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContourSettings {
    pub v_nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub delta_v: f64,
}

impl Default for ContourSettings {
    fn default() -> Self {
        Self {
            v_nodes: (0..=20).map(|k| f64::from(50 + 2 * k) / 100.0).collect(),
            weights: (0..=10).map(|k| f64::from(k) / 10.0).collect(),
            delta_v: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSettings {
    pub trace: bool,
    pub trace_trial: usize,
    pub verbosity: log::LevelFilter,
}

impl Default for OutputSettings {
    fn default() -> Self {
        Self {
            trace: false,
            trace_trial: 0,
            verbosity: log::LevelFilter::Warn,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: Option<String>,
    /// Design point; its evaluation mode is held in `eval`.
    pub design: DesignPoint,
    pub eval: EvalSettings,
    pub batch: TrialBatch,
    pub perf: PerfModel,
    pub grid: SweepGrid,
    pub contour: ContourSettings,
    /// Target precisions for `estimate`; empty means the design as given.
    pub precision_bits: Vec<u32>,
    pub output: OutputSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        let design = DesignPoint::default();
        Self {
            preset: None,
            eval: EvalSettings::from_evaluation(design.integrator.evaluation),
            design,
            batch: TrialBatch::default(),
            perf: PerfModel::default(),
            grid: SweepGrid::default(),
            contour: ContourSettings::default(),
            precision_bits: Vec::new(),
            output: OutputSettings::default(),
        }
    }
}

type Getter = fn(&RunConfig) -> String;
type Setter = fn(&mut RunConfig, &str) -> std::result::Result<(), String>;

struct Field {
    section: &'static str,
    key: &'static str,
    get: Getter,
    set: Setter,
}

fn real(v: f64) -> String {
    format!("{v:?}")
}

fn int<T: std::str::FromStr>(v: &str) -> std::result::Result<T, String> {
    v.trim().parse().map_err(|_| format!("'{v}' is not a non-negative integer"))
}

fn list<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(", ")
}

fn real_list(v: &[f64]) -> String {
    v.iter().map(|x| real(*x)).collect::<Vec<_>>().join(", ")
}

fn boolean(v: &str) -> std::result::Result<bool, String> {
    match v.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(format!("'{v}' is not a boolean")),
    }
}

macro_rules! real_field {
    ($sec:literal, $key:literal, $($path:ident).+) => {
        Field {
            section: $sec,
            key: $key,
            get: |c| real(c.$($path).+),
            set: |c, v| {
                c.$($path).+ = si::parse(v)?;
                Ok(())
            },
        }
    };
}

macro_rules! int_field {
    ($sec:literal, $key:literal, $($path:ident).+) => {
        Field {
            section: $sec,
            key: $key,
            get: |c| c.$($path).+.to_string(),
            set: |c, v| {
                c.$($path).+ = int(v)?;
                Ok(())
            },
        }
    };
}

const FIELDS: &[Field] = &[
    int_field!("design", "m_rows", design.m_rows),
    int_field!("design", "n_cols", design.n_cols),
    real_field!("design", "v_gate_on", design.v_gate_on),
    real_field!("design", "v_reset", design.v_reset),
    real_field!("design", "v_th_neuron", design.v_th_neuron),
    real_field!("design", "t_window", design.t_window),
    int_field!("design", "output_bits", design.output_bits),
    real_field!("design", "max_current_scale", design.max_current_scale),
    Field {
        section: "design",
        key: "v_cal",
        get: |c| c.design.v_cal.map_or_else(|| "auto".into(), real),
        set: |c, v| {
            c.design.v_cal = if v.trim() == "auto" { None } else { Some(si::parse(v)?) };
            Ok(())
        },
    },
    Field {
        section: "design",
        key: "topology",
        get: |c| c.design.cell.topology.name().into(),
        set: |c, v| {
            c.design.cell.topology = v.parse::<CellTopology>().map_err(|e| e.to_string())?;
            Ok(())
        },
    },
    real_field!("mosfet", "v_t0", design.cell.mosfet.v_t0),
    real_field!("mosfet", "n_slope", design.cell.mosfet.n_slope),
    real_field!("mosfet", "i_spec", design.cell.mosfet.i_spec),
    real_field!("mosfet", "w_over_l", design.cell.mosfet.w_over_l),
    real_field!("mosfet", "lambda_clm", design.cell.mosfet.lambda_clm),
    real_field!("mosfet", "eta_dibl", design.cell.mosfet.eta_dibl),
    real_field!("mosfet", "l_gate", design.cell.mosfet.l_gate),
    real_field!("mosfet", "l_ref", design.cell.mosfet.l_ref),
    real_field!("mosfet", "thermal_voltage", design.cell.mosfet.thermal_voltage),
    real_field!("rram", "beta", design.cell.rram.beta),
    Field {
        section: "rram",
        key: "r_on",
        get: |c| real(c.design.cell.rram.r_on),
        set: |c, v| {
            c.design.cell.rram.r_on = si::parse(v)?;
            c.design.cell.rram.r0 = c.design.cell.rram.r_on;
            Ok(())
        },
    },
    real_field!("rram", "r_off", design.cell.rram.r_off),
    real_field!("nonideal", "c_gd_coupling", design.nonideal.c_gd_coupling),
    real_field!("nonideal", "gate_line_attenuation", design.nonideal.gate_line_attenuation),
    real_field!("nonideal", "mismatch_sigma_vt", design.nonideal.mismatch_sigma_vt),
    Field {
        section: "nonideal",
        key: "programming_error_bits",
        get: |c| c.design.nonideal.programming_error.map_or_else(|| "off".into(), |p| p.bits.to_string()),
        set: |c, v| {
            c.design.nonideal.programming_error = match v.trim() {
                "off" | "none" => None,
                bits => Some(ProgrammingError { bits: int(bits)? }),
            };
            Ok(())
        },
    },
    int_field!("integrator", "steps_per_window", design.integrator.steps_per_window),
    real_field!("integrator", "crossing_tolerance", design.integrator.crossing_tolerance),
    Field {
        section: "integrator",
        key: "evaluation",
        get: |c| c.eval.kind.name().into(),
        set: |c, v| {
            c.eval.kind = match v.trim() {
                "exact" => EvalKind::Exact,
                "tabulated" => EvalKind::Tabulated,
                "family" => EvalKind::Family,
                other => return Err(format!("unknown evaluation '{other}' (exact, tabulated, family)")),
            };
            Ok(())
        },
    },
    int_field!("integrator", "points", eval.points),
    int_field!("integrator", "levels", eval.levels),
    int_field!("batch", "seed", batch.seed),
    int_field!("batch", "n_trials", batch.n_trials),
    Field {
        section: "batch",
        key: "sampler",
        get: |c| match c.batch.sampler {
            Sampler::ContinuousUniform => "continuous".into(),
            Sampler::GridQuantized(bits) => format!("grid:{bits}"),
        },
        set: |c, v| {
            c.batch.sampler = match v.trim() {
                "continuous" => Sampler::ContinuousUniform,
                s => match s.strip_prefix("grid:") {
                    Some(bits) => Sampler::GridQuantized(int(bits)?),
                    None => return Err(format!("unknown sampler '{s}' (continuous, grid:<bits>)")),
                },
            };
            Ok(())
        },
    },
    real_field!("perf", "dtc_energy", perf.dtc_energy),
    real_field!("perf", "tdc_energy", perf.tdc_energy),
    real_field!("perf", "neuron_energy", perf.neuron_energy),
    real_field!("perf", "dtc_area", perf.dtc_area),
    real_field!("perf", "tdc_area", perf.tdc_area),
    real_field!("perf", "neuron_area", perf.neuron_area),
    real_field!("perf", "capacitor_density", perf.capacitor_density),
    real_field!("perf", "conversion_overhead", perf.conversion_overhead),
    int_field!("perf", "reference_bits", perf.reference_bits),
    Field {
        section: "contour",
        key: "v_nodes",
        get: |c| real_list(&c.contour.v_nodes),
        set: |c, v| {
            c.contour.v_nodes = si::parse_list(v)?;
            Ok(())
        },
    },
    Field {
        section: "contour",
        key: "weights",
        get: |c| real_list(&c.contour.weights),
        set: |c, v| {
            c.contour.weights = si::parse_list(v)?;
            Ok(())
        },
    },
    real_field!("contour", "delta_v", contour.delta_v),
    Field {
        section: "estimate",
        key: "precision_bits",
        get: |c| list(&c.precision_bits),
        set: |c, v| {
            c.precision_bits = v
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(int)
                .collect::<std::result::Result<_, _>>()?;
            Ok(())
        },
    },
    Field {
        section: "output",
        key: "trace",
        get: |c| c.output.trace.to_string(),
        set: |c, v| {
            c.output.trace = boolean(v)?;
            Ok(())
        },
    },
    int_field!("output", "trace_trial", output.trace_trial),
    Field {
        section: "output",
        key: "verbosity",
        get: |c| c.output.verbosity.to_string().to_ascii_lowercase(),
        set: |c, v| {
            c.output.verbosity = v.trim().parse().map_err(|_| format!("unknown verbosity '{v}'"))?;
            Ok(())
        },
    },
];

const SECTIONS: [&str; 11] = [
    "design",
    "mosfet",
    "rram",
    "nonideal",
    "integrator",
    "batch",
    "perf",
    "sweep",
    "contour",
    "estimate",
    "output",
];

/// Written by runs and ignored when read back.
pub const MANIFEST_SECTION: &str = "manifest";

impl RunConfig {
    /// Starting point of a named preset.
    pub fn from_preset(name: &str) -> Result<Self> {
        let (design, grid) = presets::by_name(name)
            .ok_or_else(|| err(format!("unknown preset '{name}' (known: {})", presets::NAMES.join(", "))))?;
        let cfg = RunConfig {
            preset: Some(name.to_string()),
            eval: EvalSettings::from_evaluation(design.integrator.evaluation),
            design,
            grid: grid.unwrap_or_default(),
            ..Default::default()
        };
        Ok(cfg)
    }

    /// Reads a configuration file. `preset`, if given, replaces the file's
    /// own preset.
    pub fn load(path: &Path, preset: Option<&str>) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| err(format!("cannot read {}: {e}", path.display())))?;
        Self::parse_with(&text, preset).map_err(|e| err(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with(text, None)
    }

    pub fn parse_with(text: &str, preset: Option<&str>) -> Result<Self> {
        let ini = Ini::load_from_str(text).map_err(|e| err(format!("syntax error: {e}")))?;
        let mut cfg = RunConfig::default();
        let mut named = preset.map(str::to_string);
        for (key, value) in ini.general_section().iter() {
            match key {
                "preset" => {
                    named.get_or_insert_with(|| value.trim().to_string());
                }
                other => return Err(err(format!("unknown top-level key '{other}'"))),
            }
        }
        if let Some(name) = named {
            cfg = Self::from_preset(&name)?;
        }
        for (section, props) in ini.iter() {
            let Some(section) = section else { continue };
            if section == MANIFEST_SECTION {
                continue;
            }
            if !SECTIONS.contains(&section) {
                return Err(err(format!("unknown section [{section}]")));
            }
            if section == "sweep" {
                cfg.grid = SweepGrid::default();
                for (key, value) in props.iter() {
                    cfg.set_sweep_axis(key, value)?;
                }
                continue;
            }
            for (key, value) in props.iter() {
                cfg.set(section, key, value)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set_sweep_axis(&mut self, key: &str, value: &str) -> Result<()> {
        let var = SweepVar::from_name(key).ok_or_else(|| {
            let names: Vec<_> = SweepVar::ALL.iter().map(|v| v.name()).collect();
            err(format!("unknown sweep variable '{key}' (known: {})", names.join(", ")))
        })?;
        let values = si::parse_list(value).map_err(|e| err(format!("[sweep] {key}: {e}")))?;
        self.grid.axes.retain(|(v, _)| *v != var);
        self.grid.axes.push((var, values));
        Ok(())
    }

    /// Sets one key.
    pub fn set(&mut self, section: &str, key: &str, value: &str) -> Result<()> {
        if section == "sweep" {
            return self.set_sweep_axis(key, value);
        }
        let field = FIELDS
            .iter()
            .find(|f| f.section == section && f.key == key)
            .ok_or_else(|| err(format!("unknown key '{key}' in [{section}]")))?;
        (field.set)(self, value).map_err(|e| err(format!("[{section}] {key}: {e}")))
    }

    /// Applies a `section.key=value` override.
    pub fn apply_override(&mut self, spec: &str) -> Result<()> {
        let (path, value) = spec
            .split_once('=')
            .ok_or_else(|| err(format!("override '{spec}' is not section.key=value")))?;
        let (section, key) = path
            .trim()
            .split_once('.')
            .ok_or_else(|| err(format!("override '{spec}' is not section.key=value")))?;
        self.set(section, key, value.trim())
    }

    /// The design point with its evaluation mode applied.
    pub fn design(&self) -> DesignPoint {
        let mut dp = self.design;
        dp.integrator.evaluation = self.eval.evaluation();
        dp
    }

    pub fn validate(&self) -> Result<()> {
        self.design().validate().map_err(|e| err(e.to_string()))?;
        self.batch.validate().map_err(|e| err(e.to_string()))?;
        self.perf.validate().map_err(|e| err(e.to_string()))?;
        for (var, values) in &self.grid.axes {
            if values.is_empty() {
                return Err(err(format!("[sweep] {} has no values", var.name())));
            }
        }
        if !(self.contour.delta_v > 0.0) {
            return Err(err("[contour] delta_v must be > 0"));
        }
        if self.contour.v_nodes.iter().chain(&self.contour.weights).any(|v| !(0.0..=1.0).contains(v)) {
            return Err(err("[contour] v_nodes and weights must lie in [0, 1]"));
        }
        if self.precision_bits.iter().any(|b| !(1..=30).contains(b)) {
            return Err(err("[estimate] precision_bits must lie in 1..=30"));
        }
        Ok(())
    }

    /// Complete configuration with every key spelled out. Parsing it gives
    /// back an identical `RunConfig`.
    pub fn resolved(&self) -> String {
        let mut out = String::new();
        if let Some(p) = &self.preset {
            out += &format!("preset = {p}\n");
        }
        for section in SECTIONS {
            out += &format!("\n[{section}]\n");
            if section == "sweep" {
                for (var, values) in &self.grid.axes {
                    out += &format!("{} = {}\n", var.name(), real_list(values));
                }
                continue;
            }
            for f in FIELDS.iter().filter(|f| f.section == section) {
                out += &format!("{} = {}\n", f.key, (f.get)(self));
            }
        }
        out
    }

    /// SHA-256 of the resolved configuration.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.resolved().as_bytes()))
    }
}
