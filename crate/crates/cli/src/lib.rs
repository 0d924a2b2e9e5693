//! Command-line front end: configuration files, run commands and their
//! CSV outputs.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 configuration error,
//! 3 a `--strict` check failed.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use tdvmm::par::Execution;

pub mod commands;
pub mod config;
pub mod output;
pub mod si;

use config::{ConfigError, RunConfig};
use output::OutDir;

#[derive(Debug)]
pub enum Failure {
    Config(String),
    Strict(String),
    Runtime(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Runtime(_) => 1,
            Failure::Config(_) => 2,
            Failure::Strict(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Strict(m) => write!(f, "strict check failed: {m}"),
            Failure::Runtime(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

impl From<tdvmm::Error> for Failure {
    fn from(e: tdvmm::Error) -> Self {
        match e {
            tdvmm::Error::Config(m) => Failure::Config(m),
            other => Failure::Runtime(other.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast::<tdvmm::Error>() {
            Ok(inner) => inner.into(),
            Err(e) => Failure::Runtime(e),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "tdvmm", version, about = "Time-domain VMM array simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalOpts,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo run of one design point.
    Simulate,
    /// Evaluate every point of the [sweep] grid.
    Sweep,
    /// Local CLM/DIBL error map over node voltage and weight.
    Contour,
    /// Area, energy and throughput breakdown.
    Estimate,
    /// List the built-in presets.
    Presets,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Sweep => "sweep",
            Command::Contour => "contour",
            Command::Estimate => "estimate",
            Command::Presets => "presets",
        }
    }
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Configuration file (INI). A previous run's manifest.ini works too.
    #[arg(short, long, global = true)]
    pub config: Option<PathBuf>,
    /// Start from a named preset instead of the file's own.
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// Override one key, e.g. --set design.m_rows=32. Repeatable.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE", global = true)]
    pub overrides: Vec<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; 1 runs sequentially.
    #[arg(short, long, global = true)]
    pub jobs: Option<usize>,
    /// Fail with exit code 3 on overflow, underflow or failed sweep points.
    #[arg(long, global = true)]
    pub strict: bool,
    #[arg(short, long, global = true, default_value = "out")]
    pub out_dir: PathBuf,
    /// source-connected or drain-connected.
    #[arg(long, global = true)]
    pub topology: Option<String>,
    /// Also write capacitor trajectories (simulate).
    #[arg(long, global = true)]
    pub trace: bool,
}

/// Builds the run configuration: preset, file, `--set` overrides, then the
/// dedicated flags.
pub fn resolve_config(g: &GlobalOpts) -> Result<RunConfig, ConfigError> {
    let mut cfg = match &g.config {
        Some(path) => RunConfig::load(path, g.preset.as_deref())?,
        None => RunConfig::parse_with("", g.preset.as_deref())?,
    };
    for spec in &g.overrides {
        cfg.apply_override(spec)?;
    }
    if let Some(seed) = g.seed {
        cfg.batch.seed = seed;
    }
    if let Some(t) = &g.topology {
        cfg.set("design", "topology", t)?;
    }
    if g.trace {
        cfg.output.trace = true;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execution(jobs: Option<usize>) -> Result<Execution, Failure> {
    match jobs {
        Some(0) => Err(Failure::Config("--jobs must be >= 1".into())),
        Some(1) => Ok(Execution::Sequential),
        Some(n) => {
            // Fails only if a pool already exists, which keeps its size.
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                log::debug!("thread pool: {e}");
            }
            Ok(Execution::Parallel)
        }
        None => Ok(Execution::Parallel),
    }
}

pub fn run(cli: &Cli) -> Result<(), Failure> {
    if let Command::Presets = cli.command {
        for name in tdvmm::presets::NAMES {
            println!("{name}");
        }
        return Ok(());
    }
    let cfg = resolve_config(&cli.global)?;
    let _ = env_logger::Builder::new()
        .filter_level(cfg.output.verbosity)
        .parse_default_env()
        .try_init();
    log::info!("{} with config {}", cli.command.name(), cfg.hash());
    let out = OutDir::create(&cli.global.out_dir)?;
    let ctx = commands::Context {
        cfg: &cfg,
        out: &out,
        exec: execution(cli.global.jobs)?,
        strict: cli.global.strict,
    };
    match cli.command {
        Command::Simulate => commands::simulate(&ctx),
        Command::Sweep => commands::sweep_cmd(&ctx),
        Command::Contour => commands::contour(&ctx),
        Command::Estimate => commands::estimate(&ctx),
        Command::Presets => unreachable!(),
    }
}

/// Parses arguments, runs and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("tdvmm: {f}");
            f.exit_code()
        }
    }
}
