//! Config-driven runs behind the `taperline` binary.

pub mod commands;
pub mod config;
pub mod figures;

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};

use serde_json::{json, Value};

pub use commands::{entangle, optimize, scatter};
pub use config::{Antenna, ConfigError, Format, Output, ProfileSpec, RunConfig, Thermal};
pub use figures::{fig4, fig5, fig6, fig7, fig8, run_figure};

use crate::Error;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Engine(#[from] Error),
    #[error("writing {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl RunError {
    /// 2 for bad input, 3 for numerical failure, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Engine(e) => match e {
                Error::InvalidProfile(_)
                | Error::OutOfDomain { .. }
                | Error::NotDiscretized
                | Error::Precondition(_)
                | Error::NoThreshold(_) => 2,
                _ => 3,
            },
            RunError::Io { .. } => 1,
        }
    }
}

/// One run's results: a JSON summary plus named CSV tables.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub name: String,
    pub summary: Value,
    pub tables: Vec<(String, String)>,
    pub partial: bool,
}

impl RunOutput {
    fn new(name: &str, summary: Value) -> Self {
        Self { name: name.into(), summary, tables: Vec::new(), partial: false }
    }

    fn table(mut self, name: &str, csv: String) -> Self {
        self.tables.push((name.into(), csv));
        self
    }

    /// The summary wrapped with the config echo and the `partial` marker.
    pub fn document(&self, cfg: &RunConfig) -> Value {
        json!({
            "command": self.name,
            "partial": self.partial,
            "config": cfg,
            "result": self.summary,
        })
    }

    /// Writes `<name>.json` and `<table>.csv` for the enabled formats;
    /// returns the paths written.
    pub fn write(&self, cfg: &RunConfig) -> Result<Vec<PathBuf>, RunError> {
        let dir = &cfg.output.directory;
        std::fs::create_dir_all(dir).map_err(|source| RunError::Io { path: dir.clone(), source })?;
        let mut written = Vec::new();
        if cfg.output.formats.contains(&Format::Json) {
            let text = serde_json::to_string_pretty(&self.document(cfg)).expect("json values serialize");
            written.push(write_file(dir, &format!("{}.json", self.name), &text)?);
        }
        if cfg.output.formats.contains(&Format::Csv) {
            for (name, csv) in &self.tables {
                written.push(write_file(dir, &format!("{name}.csv"), csv)?);
            }
        }
        Ok(written)
    }
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<PathBuf, RunError> {
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|source| RunError::Io { path: path.clone(), source })?;
    Ok(path)
}

fn stopped(stop: &AtomicBool) -> bool {
    stop.load(Ordering::Relaxed)
}

/// Builds CSV text; floats use Rust's shortest round-trip formatting.
pub(crate) struct Csv(String);

impl Csv {
    pub(crate) fn new(header: &str) -> Self {
        Self(format!("{header}\n"))
    }

    pub(crate) fn row(&mut self, cells: &[&dyn std::fmt::Display]) {
        let line: Vec<String> = cells.iter().map(|c| c.to_string()).collect();
        self.0.push_str(&line.join(","));
        self.0.push('\n');
    }

    pub(crate) fn finish(self) -> String {
        self.0
    }
}
