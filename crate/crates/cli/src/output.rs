//! Report emission and run manifests.
//!
//! Every command produces one canonical JSON report and, optionally, a flat
//! CSV projection of its main table. With `--out` the JSON goes to the given
//! path (CSV alongside, same stem) and a run manifest is written next to it;
//! without `--out` the report is printed to stdout and nothing touches the
//! filesystem. Given the same seed and inputs the written reports are
//! byte-identical across runs; only the manifest's wall-time field varies.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::Failure;

/// Provenance record written alongside file outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    /// The exact argument vector of the invocation.
    pub command: Vec<String>,
    /// SHA-256 of the effective (merged) settings the command ran with.
    pub config_digest: String,
    pub seed: u64,
    pub version: String,
    /// Wall-clock duration of the run; the only field that varies between
    /// identical runs.
    pub wall_ms: u128,
    pub outputs: Vec<String>,
}

/// One flat table: a header row plus data rows.
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: Vec<S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<S: Into<String>>(&mut self, row: Vec<S>) {
        self.rows.push(row.into_iter().map(Into::into).collect());
    }

    fn to_bytes(&self) -> Result<Vec<u8>, Failure> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record(&self.header)
            .and_then(|()| self.rows.iter().try_for_each(|r| writer.write_record(r)))
            .map_err(|e| Failure::input(format!("csv encoding: {e}")))?;
        writer
            .into_inner()
            .map_err(|e| Failure::input(format!("csv encoding: {e}")))
    }
}

/// Everything a command hands back for emission.
pub struct CmdOutput {
    pub json: serde_json::Value,
    pub table: CsvTable,
}

/// Fixed-width float formatting used in CSV cells, chosen to round-trip f64.
pub fn cell(v: f64) -> String {
    format!("{v:.17e}")
}

fn digest_of(effective: &serde_json::Value) -> String {
    let mut hasher = Sha256::new();
    hasher.update(effective.to_string().as_bytes());
    let bytes = hasher.finalize();
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// A closed stdout (`mc ... | head`) is not an error worth reporting.
fn print_tolerating_closed_pipe(text: &str) -> Result<(), Failure> {
    match std::io::stdout().write_all(text.as_bytes()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(Failure::input(format!("cannot write to stdout: {e}"))),
    }
}

/// Writes or prints the report; returns the exit code's "success" either
/// way so callers can still decide the final code (e.g. `validate`).
pub fn emit(
    out: Option<&Path>,
    want_csv: bool,
    output: &CmdOutput,
    manifest_seed: u64,
    effective: &serde_json::Value,
    started: Instant,
) -> Result<(), Failure> {
    let json_text = serde_json::to_string_pretty(&output.json)
        .map_err(|e| Failure::input(format!("report serialization: {e}")))?;
    match out {
        None => {
            let text = if want_csv {
                String::from_utf8_lossy(&output.table.to_bytes()?).into_owned()
            } else {
                format!("{json_text}\n")
            };
            print_tolerating_closed_pipe(&text)
        }
        Some(path) => {
            let mut outputs = vec![path.display().to_string()];
            std::fs::write(path, json_text.as_bytes())
                .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?;
            if want_csv {
                let csv_path: PathBuf = path.with_extension("csv");
                std::fs::write(&csv_path, output.table.to_bytes()?).map_err(|e| {
                    Failure::input(format!("cannot write {}: {e}", csv_path.display()))
                })?;
                outputs.push(csv_path.display().to_string());
            }
            let manifest = RunManifest {
                command: std::env::args().collect(),
                config_digest: digest_of(effective),
                seed: manifest_seed,
                version: env!("CARGO_PKG_VERSION").to_string(),
                wall_ms: started.elapsed().as_millis(),
                outputs,
            };
            let manifest_path = PathBuf::from(format!("{}.manifest.json", path.display()));
            let text = serde_json::to_string_pretty(&manifest)
                .map_err(|e| Failure::input(format!("manifest serialization: {e}")))?;
            std::fs::write(&manifest_path, text).map_err(|e| {
                Failure::input(format!("cannot write {}: {e}", manifest_path.display()))
            })?;
            Ok(())
        }
    }
}
