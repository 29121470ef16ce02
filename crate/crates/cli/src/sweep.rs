//! Parameter sweeps over cycle inputs, written as CSV.

use num_complex::Complex64 as C64;
use qcycle::channels::GateModel;
use qcycle::fmt::format_significant;
use qcycle::protocol::{run_cycle, CycleInput, CycleReport, MeasurementBasis};
use rayon::prelude::*;

use crate::config::ConfigFile;
use crate::errors::CliError;
use crate::reftable::{amplitude_with_coherence, reference_table};

/// One sweep grid point: the CSV key and the cycle input it denotes.
#[derive(Clone, Debug)]
pub struct SweepPoint {
    /// Value written to the CSV `key` column.
    pub key: f64,
    /// The input state specification.
    pub input: CycleInput,
}

/// Parse a basis name (`pauli-y` or `fourier`).
pub fn parse_basis(name: &str) -> Result<MeasurementBasis, CliError> {
    match name {
        "pauli-y" => Ok(MeasurementBasis::pauli_y()),
        "fourier" => MeasurementBasis::fourier(2)
            .map_err(|err| CliError::runtime(err.to_string())),
        other => Err(CliError::usage(format!(
            "unknown basis {other:?} (expected \"pauli-y\" or \"fourier\")"
        ))),
    }
}

/// Effective basis from flag and config (default `pauli-y`).
pub fn resolve_basis(
    flag: Option<&str>,
    config: &ConfigFile,
) -> Result<MeasurementBasis, CliError> {
    let name = flag
        .map(str::to_owned)
        .or_else(|| config.basis.clone())
        .unwrap_or_else(|| "pauli-y".into());
    parse_basis(&name)
}

/// Build the grid points for a sweep.
///
/// `mode` is `"pure"` (keys are preparation angles in degrees) or
/// `"mixed"` (keys are off-diagonal magnitudes). `grid` is either
/// `"table"` — the embedded reference grid for that mode, with the table's
/// own keys — or a comma-separated value list.
pub fn build_points(mode: &str, grid: &str) -> Result<Vec<SweepPoint>, CliError> {
    let usage = |err: qcycle::Error| CliError::usage(err.to_string());
    match (mode, grid) {
        ("pure", "table") => reference_table("pure")?
            .rows
            .iter()
            .map(|row| {
                Ok(SweepPoint {
                    key: row.key,
                    input: CycleInput::pure(row.key).map_err(usage)?,
                })
            })
            .collect(),
        ("mixed", "table") => reference_table("mixed")?
            .rows
            .iter()
            .map(|row| {
                let c_initial = row
                    .c_initial
                    .expect("mixed table always carries initial coherence");
                let amplitude = amplitude_with_coherence(c_initial)?;
                Ok(SweepPoint {
                    key: row.key,
                    input: CycleInput::mixed(C64::new(amplitude, 0.0)).map_err(usage)?,
                })
            })
            .collect(),
        ("pure", values) => parse_grid(values)?
            .into_iter()
            .map(|theta| {
                Ok(SweepPoint {
                    key: theta,
                    input: CycleInput::pure(theta).map_err(usage)?,
                })
            })
            .collect(),
        ("mixed", values) => parse_grid(values)?
            .into_iter()
            .map(|amplitude| {
                Ok(SweepPoint {
                    key: amplitude,
                    input: CycleInput::mixed(C64::new(amplitude, 0.0)).map_err(usage)?,
                })
            })
            .collect(),
        (other, _) => Err(CliError::usage(format!(
            "unknown mode {other:?} (expected \"pure\" or \"mixed\")"
        ))),
    }
}

fn parse_grid(values: &str) -> Result<Vec<f64>, CliError> {
    let parsed: Result<Vec<f64>, _> = values
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect();
    let grid =
        parsed.map_err(|_| CliError::usage(format!("bad grid value in {values:?}")))?;
    if grid.is_empty() {
        return Err(CliError::usage("empty sweep grid"));
    }
    Ok(grid)
}

/// Run every grid point (in parallel, gathered in grid order).
pub fn run_sweep(
    points: &[SweepPoint],
    gate: &GateModel,
    basis: &MeasurementBasis,
) -> Result<Vec<(f64, CycleReport)>, CliError> {
    points
        .par_iter()
        .map(|point| {
            run_cycle(&point.input, gate, basis)
                .map(|report| (point.key, report))
                .map_err(CliError::from)
        })
        .collect()
}

/// Render sweep rows as CSV: 9 significant digits, LF line endings.
pub fn sweep_csv(rows: &[(f64, CycleReport)]) -> String {
    let mut out = String::from("key,c_initial,discord,qi_rel_ent,c_final,p_plus,p_minus\n");
    for (key, report) in rows {
        let outcome_probability = |index: usize| -> f64 {
            report
                .outcomes
                .iter()
                .find(|o| o.outcome == index)
                .map(|o| o.probability)
                .unwrap_or(0.0)
        };
        let fields = [
            *key,
            report.c_initial,
            report.discord,
            report.qi_rel_ent,
            report.c_final,
            outcome_probability(0),
            outcome_probability(1),
        ];
        let line: Vec<String> = fields
            .iter()
            .map(|&v| format_significant(v, 9))
            .collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}
