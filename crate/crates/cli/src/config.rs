//! Optional JSON configuration file merged under explicit flags.
//!
//! Every field mirrors a long flag; a value given on the command line
//! always wins over the file, and the file wins over built-in defaults.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::errors::CliError;

/// Flag defaults loadable from `--config <file>`.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    /// Depolarization weight for the conversion gate.
    pub lambda: Option<f64>,
    /// Target process fidelity for the conversion gate.
    pub fidelity: Option<f64>,
    /// Path to a process-matrix JSON file.
    pub chi: Option<PathBuf>,
    /// Measurement basis name (`pauli-y` or `fourier`).
    pub basis: Option<String>,
    /// Sweep mode (`pure` or `mixed`).
    pub mode: Option<String>,
    /// Sweep grid (`table` or comma-separated values).
    pub grid: Option<String>,
    /// Base seed for sampled tomography.
    pub seed: Option<u64>,
    /// Shots per measurement setting.
    pub shots: Option<u64>,
    /// Report threshold on the RMS discord deviation.
    pub max_rms_discord: Option<f64>,
    /// Report threshold on the RMS final-coherence deviation.
    pub max_rms_cfinal: Option<f64>,
}

impl ConfigFile {
    /// Load a config file, or return defaults when no path is given.
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|err| {
            CliError::usage(format!("cannot read config {}: {err}", path.display()))
        })?;
        serde_json::from_str(&text)
            .map_err(|err| CliError::usage(format!("bad config {}: {err}", path.display())))
    }
}
