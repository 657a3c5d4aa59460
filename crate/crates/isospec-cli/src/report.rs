//! Run reports: what a command was asked to do, what it wrote, and what it
//! checked. Every subcommand leaves one `run_report.json` in its output
//! directory.

use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const REPORT_FILE: &str = "run_report.json";

/// One numeric self-check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    /// Largest measured deviation, in the check's stated units.
    pub residual: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckReport {
    /// Pass/fail from residual against tolerance; NaN never passes.
    pub fn measured(name: &str, residual: f64, tolerance: f64) -> Self {
        CheckReport {
            name: name.to_string(),
            passed: residual <= tolerance,
            residual,
            tolerance,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    /// The command line as invoked.
    pub command: String,
    /// SHA-256 of the config file bytes, when a config was read.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
    /// Wall-clock seconds for the run.
    pub seconds: f64,
    /// Files this run wrote, relative to the output directory.
    pub outputs: Vec<String>,
    pub checks: Vec<CheckReport>,
}

impl RunReport {
    pub fn new(config_hash: Option<String>) -> Self {
        RunReport {
            command: std::env::args().collect::<Vec<_>>().join(" "),
            config_hash,
            seconds: 0.0,
            outputs: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Serialize into `dir`, listing the report itself as the last output.
    pub fn write(mut self, dir: &Path) -> isospec::Result<Self> {
        self.outputs.push(REPORT_FILE.to_string());
        let mut text = serde_json::to_string_pretty(&self)?;
        text.push('\n');
        std::fs::write(dir.join(REPORT_FILE), text)?;
        Ok(self)
    }
}

pub fn hash_file(path: &Path) -> isospec::Result<String> {
    Ok(hex::encode(Sha256::digest(std::fs::read(path)?)))
}
