//! Optional file-based defaults for command-line flags.
//!
//! A config file (TOML or JSON, one flat table) may supply any flag of any
//! subcommand; explicit command-line values always win. Unknown keys are
//! rejected so that typos surface instead of silently falling back to the
//! built-in defaults.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::Failure;

/// Flat bag of flag defaults; every field optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    // Global flags.
    pub jobs: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub csv: Option<bool>,

    // File inputs.
    pub space: Option<PathBuf>,
    pub relation: Option<PathBuf>,
    pub x: Option<String>,
    pub y: Option<String>,

    // Numeric knobs.
    pub eps: Option<f64>,
    pub mu: Option<f64>,
    pub budget: Option<u64>,
    pub classical: Option<bool>,
    pub samples: Option<usize>,
    pub resolution: Option<usize>,
    pub viewpoint: Option<usize>,

    // Structure selection.
    pub structure: Option<String>,
    pub alpha: Option<f64>,
    pub dim: Option<usize>,
    pub schedule: Option<String>,
    pub map: Option<String>,
    pub base: Option<String>,
    pub report: Option<PathBuf>,
}

impl FileConfig {
    /// Reads a config file, deciding the format by extension and falling
    /// back to trying both parsers.
    pub fn read(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::input(format!("cannot read config {}: {e}", path.display())))?;
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .unwrap_or("")
            .to_ascii_lowercase();
        let parsed = match ext.as_str() {
            "toml" => toml::from_str(&text).map_err(|e| format!("TOML: {e}")),
            "json" => serde_json::from_str(&text).map_err(|e| format!("JSON: {e}")),
            _ => toml::from_str(&text)
                .map_err(|e| format!("TOML: {e}"))
                .or_else(|toml_err| {
                    serde_json::from_str(&text)
                        .map_err(|json_err| format!("{toml_err}; JSON: {json_err}"))
                }),
        };
        parsed.map_err(|e| Failure::input(format!("config {}: {e}", path.display())))
    }
}

/// Command-line value if present, else config value, else the default.
pub fn pick<T: Clone>(cli: Option<T>, file: Option<T>, default: T) -> T {
    cli.or(file).unwrap_or(default)
}

/// Command-line value if present, else config value.
pub fn pick_opt<T: Clone>(cli: Option<T>, file: Option<T>) -> Option<T> {
    cli.or(file)
}

/// Required setting: command line, else config file, else an input error
/// naming the flag.
pub fn require<T: Clone>(cli: Option<T>, file: Option<T>, flag: &str) -> Result<T, Failure> {
    cli.or(file)
        .ok_or_else(|| Failure::input(format!("missing required flag --{flag}")))
}
