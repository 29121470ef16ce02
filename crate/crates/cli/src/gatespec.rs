//! Resolution of the conversion-gate flags into a gate model.

use std::path::{Path, PathBuf};

use clap::Args;
use qcycle::channels::{
    depolarized_cnot, generalized_cnot, lambda_for_process_fidelity, ChiMatrix, GateModel,
};
use qcycle::fmt::format_significant;

use crate::config::ConfigFile;
use crate::errors::CliError;

/// Flags choosing the two-qubit conversion gate (default: the ideal gate).
#[derive(Args, Clone, Debug, Default)]
pub struct GateArgs {
    /// Depolarization weight in [0, 1]: keep the ideal action with this
    /// probability, fully depolarize otherwise.
    #[arg(long, conflicts_with_all = ["fidelity", "chi"])]
    pub lambda: Option<f64>,

    /// Target process fidelity in [1/16, 1]; converted to the equivalent
    /// depolarization weight.
    #[arg(long, conflicts_with = "chi")]
    pub fidelity: Option<f64>,

    /// Path to a process-matrix JSON file describing the gate.
    #[arg(long)]
    pub chi: Option<PathBuf>,
}

/// A resolved gate with a stable description for reports.
pub struct ResolvedGate {
    /// The gate model to simulate.
    pub model: GateModel,
    /// Human-readable description embedded in outputs.
    pub description: String,
}

impl GateArgs {
    /// Resolve flags (falling back to config values) into a gate model.
    pub fn resolve(&self, config: &ConfigFile) -> Result<ResolvedGate, CliError> {
        // Explicit flags take the gate choice wholesale; otherwise fall
        // back to the config file's gate fields.
        let (lambda, fidelity, chi) =
            if self.lambda.is_some() || self.fidelity.is_some() || self.chi.is_some() {
                (self.lambda, self.fidelity, self.chi.clone())
            } else {
                (config.lambda, config.fidelity, config.chi.clone())
            };

        let chosen = [lambda.is_some(), fidelity.is_some(), chi.is_some()]
            .iter()
            .filter(|&&b| b)
            .count();
        if chosen > 1 {
            return Err(CliError::usage(
                "choose at most one of --lambda, --fidelity, --chi",
            ));
        }

        if let Some(path) = chi {
            let model = load_chi(&path)?;
            return Ok(ResolvedGate {
                model: GateModel::Chi(model),
                description: "chi-file".into(),
            });
        }
        let lambda = match (lambda, fidelity) {
            (Some(l), _) => Some(l),
            (None, Some(f)) => Some(
                lambda_for_process_fidelity(f)
                    .map_err(|err| CliError::usage(err.to_string()))?,
            ),
            (None, None) => None,
        };
        match lambda {
            Some(l) => {
                let chi = depolarized_cnot(l).map_err(|err| CliError::usage(err.to_string()))?;
                Ok(ResolvedGate {
                    model: GateModel::Chi(chi),
                    description: format!("depolarized lambda={}", format_significant(l, 9)),
                })
            }
            None => Ok(ResolvedGate {
                model: GateModel::Unitary(
                    generalized_cnot(2).expect("two-level gate exists"),
                ),
                description: "ideal".into(),
            }),
        }
    }
}

fn load_chi(path: &Path) -> Result<ChiMatrix, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|err| CliError::runtime(format!("cannot read {}: {err}", path.display())))?;
    ChiMatrix::from_json(&text)
        .map_err(|err| CliError::runtime(format!("bad process matrix {}: {err}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_gate_is_ideal() {
        let resolved = GateArgs::default().resolve(&ConfigFile::default()).unwrap();
        assert_eq!(resolved.description, "ideal");
        assert!(matches!(resolved.model, GateModel::Unitary(_)));
    }

    #[test]
    fn fidelity_flag_maps_to_depolarization_weight() {
        let args = GateArgs {
            fidelity: Some(0.885),
            ..GateArgs::default()
        };
        let resolved = args.resolve(&ConfigFile::default()).unwrap();
        assert_eq!(resolved.description, "depolarized lambda=0.877333333");
    }

    #[test]
    fn flags_override_config_gate() {
        let config = ConfigFile {
            lambda: Some(0.5),
            ..ConfigFile::default()
        };
        let args = GateArgs {
            lambda: Some(0.9),
            ..GateArgs::default()
        };
        let resolved = args.resolve(&config).unwrap();
        assert_eq!(resolved.description, "depolarized lambda=0.9");
        let from_config = GateArgs::default().resolve(&config).unwrap();
        assert_eq!(from_config.description, "depolarized lambda=0.5");
    }

    #[test]
    fn chi_file_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gate.json");
        std::fs::write(&path, depolarized_cnot(0.7).unwrap().to_json()).unwrap();
        let args = GateArgs {
            chi: Some(path),
            ..GateArgs::default()
        };
        let resolved = args.resolve(&ConfigFile::default()).unwrap();
        assert_eq!(resolved.description, "chi-file");
        assert!(matches!(resolved.model, GateModel::Chi(_)));
        let missing = GateArgs {
            chi: Some(PathBuf::from("/nonexistent/gate.json")),
            ..GateArgs::default()
        };
        assert!(missing.resolve(&ConfigFile::default()).is_err());
    }
}
