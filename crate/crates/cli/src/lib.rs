//! Scenario runner for the photon-wigner pipeline: presets, JSON configuration,
//! deterministic CSV/JSON emitters and the invariant report.

pub mod emit;
pub mod scenario;
pub mod validate;

use serde::Serialize;
use std::path::Path;

/// Machine-readable failure record; `kind` is the library error variant or Config/Io.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliError {
    pub kind: String,
    pub message: String,
}

impl CliError {
    pub fn config(message: String) -> Self {
        Self { kind: "Config".into(), message }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self { kind: "Io".into(), message: format!("{}: {e}", path.display()) }
    }

    pub fn write(e: std::io::Error) -> Self {
        let kind = if e.kind() == std::io::ErrorKind::BrokenPipe { "BrokenPipe" } else { "Io" };
        Self { kind: kind.into(), message: e.to_string() }
    }

    pub fn csv(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Self::write(io),
            other => Self { kind: "Io".into(), message: format!("{other:?}") },
        }
    }

    /// The reader of stdout went away; not a failure of the run.
    pub fn is_broken_pipe(&self) -> bool {
        self.kind == "BrokenPipe"
    }

    /// Prefixes I/O messages with the file they concern.
    pub fn at(self, path: &Path) -> Self {
        if self.kind == "Io" {
            Self { message: format!("{}: {}", path.display(), self.message), ..self }
        } else {
            self
        }
    }

    /// `{"error": {"kind": ..., "message": ...}}` on one line.
    pub fn record(&self) -> String {
        serde_json::json!({ "error": self }).to_string()
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl std::error::Error for CliError {}

impl From<photon_wigner::Error> for CliError {
    fn from(e: photon_wigner::Error) -> Self {
        let debug = format!("{e:?}");
        let kind = debug.chars().take_while(|c| c.is_alphanumeric()).collect();
        Self { kind, message: e.to_string() }
    }
}
