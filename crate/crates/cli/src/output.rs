//! Output directory, CSV tables and the run manifest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use crate::config::{RunConfig, MANIFEST_SECTION};

/// Version of the CSV layouts written by this tool.
pub const SCHEMA_VERSION: u32 = 1;

pub struct OutDir {
    path: PathBuf,
}

impl OutDir {
    pub fn create(path: &Path) -> Result<Self> {
        fs::create_dir_all(path).with_context(|| format!("cannot create {}", path.display()))?;
        Ok(Self { path: path.to_path_buf() })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Writes through a temporary file and a rename, so readers never see a
    /// half-written file.
    pub fn write(&self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let target = self.path.join(name);
        let tmp = self.path.join(format!(".{name}.tmp"));
        let mut f = fs::File::create(&tmp).with_context(|| format!("cannot create {}", tmp.display()))?;
        f.write_all(bytes)?;
        f.sync_all()?;
        drop(f);
        fs::rename(&tmp, &target).with_context(|| format!("cannot write {}", target.display()))?;
        Ok(target)
    }

    pub fn write_table(&self, name: &str, table: &Table) -> Result<PathBuf> {
        self.write(name, &table.to_bytes()?)
    }

    pub fn write_manifest(&self, cfg: &RunConfig, command: &str) -> Result<PathBuf> {
        self.write("manifest.ini", manifest(cfg, command).as_bytes())
    }
}

/// A CSV table with a fixed header.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self {
            header: header.iter().map(|h| h.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))
    }
}

/// Shortest text that parses back to the same number.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// The resolved configuration followed by a `[manifest]` section. Feeding
/// the file back as a configuration reproduces the run.
pub fn manifest(cfg: &RunConfig, command: &str) -> String {
    let mut out = cfg.resolved();
    out += &format!("\n[{MANIFEST_SECTION}]\n");
    out += &format!("tool = tdvmm {}\n", env!("CARGO_PKG_VERSION"));
    out += &format!("command = {command}\n");
    out += &format!("config_sha256 = {}\n", cfg.hash());
    out += &format!("seed = {}\n", cfg.batch.seed);
    out += &format!("schema_version = {SCHEMA_VERSION}\n");
    out
}
