//! Embedded experimental reference tables and derived input grids.
//!
//! Two measurement tables ship with the binary: `pure` (keyed by the
//! preparation angle θ in degrees) and `mixed` (keyed by the dephasing
//! crystal thickness, with a measured initial coherence per row). The
//! files are embedded verbatim, checksummed against frozen digests so they
//! cannot drift silently, and never recomputed.

use qcycle::measures::binary_entropy;
use sha2::{Digest, Sha256};

use crate::errors::CliError;

const PURE_CSV: &str = include_str!("../data/reference_pure.csv");
const MIXED_CSV: &str = include_str!("../data/reference_mixed.csv");

/// Frozen SHA-256 of the embedded `pure` table.
const PURE_SHA256: &str = "2b32c9143f825f67770d9df896aee89a1bf72916860ec17c16f8b3b9787b3177";
/// Frozen SHA-256 of the embedded `mixed` table.
const MIXED_SHA256: &str = "84acb82df1ef6d0229686e309b221d58a8f028ac90f3863289d6ecb903624161";

/// One reference row.
#[derive(Clone, Copy, Debug)]
pub struct ReferenceRow {
    /// Table key: θ in degrees (`pure`) or crystal thickness (`mixed`).
    pub key: f64,
    /// Measured initial coherence; present only in the `mixed` table.
    pub c_initial: Option<f64>,
    /// Measured discord after the conversion gate.
    pub discord: f64,
    /// Measured coherence restored after the full cycle.
    pub c_final: f64,
}

/// A parsed, checksum-verified reference table.
#[derive(Clone, Debug)]
pub struct ReferenceTable {
    /// `"pure"` or `"mixed"`.
    pub id: &'static str,
    /// Rows in file order.
    pub rows: Vec<ReferenceRow>,
}

fn sha256_hex(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn parse_table(
    id: &'static str,
    csv: &str,
    expected_header: &str,
    expected_sha: &str,
) -> Result<ReferenceTable, CliError> {
    let actual = sha256_hex(csv);
    if actual != expected_sha {
        return Err(CliError::runtime(format!(
            "embedded {id} reference table fails its checksum ({actual})"
        )));
    }
    let mut lines = csv.lines();
    let header = lines.next().unwrap_or_default();
    if header != expected_header {
        return Err(CliError::runtime(format!(
            "embedded {id} reference table has header {header:?}"
        )));
    }
    let has_c_initial = expected_header.contains("c_initial");
    let mut rows = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let parse = |s: &str| -> Result<f64, CliError> {
            s.parse()
                .map_err(|_| CliError::runtime(format!("bad number {s:?} in {id} table")))
        };
        if has_c_initial {
            rows.push(ReferenceRow {
                key: parse(fields[0])?,
                c_initial: Some(parse(fields[1])?),
                discord: parse(fields[2])?,
                c_final: parse(fields[3])?,
            });
        } else {
            rows.push(ReferenceRow {
                key: parse(fields[0])?,
                c_initial: None,
                discord: parse(fields[1])?,
                c_final: parse(fields[2])?,
            });
        }
    }
    Ok(ReferenceTable { id, rows })
}

/// Load a reference table by id (`"pure"` or `"mixed"`).
pub fn reference_table(id: &str) -> Result<ReferenceTable, CliError> {
    match id {
        "pure" => parse_table("pure", PURE_CSV, "theta_deg,discord,c_final", PURE_SHA256),
        "mixed" => parse_table(
            "mixed",
            MIXED_CSV,
            "l,c_initial,discord,c_final",
            MIXED_SHA256,
        ),
        other => Err(CliError::usage(format!(
            "unknown reference table {other:?} (expected \"pure\" or \"mixed\")"
        ))),
    }
}

/// Invert `c = 1 - h((1 + |a|) / 2)` for `|a|`: the off-diagonal magnitude
/// a dephased qubit needs for initial coherence `c`. Monotone on
/// `|a| ∈ [0, 1]`, solved by bisection.
pub fn amplitude_with_coherence(c: f64) -> Result<f64, CliError> {
    if !(0.0..=1.0).contains(&c) || !c.is_finite() {
        return Err(CliError::usage(format!(
            "initial coherence {c} outside [0, 1]"
        )));
    }
    let target = 1.0 - c; // h(p) value to hit, p in [1/2, 1]
    let mut lo = 0.5; // h(lo) = 1 >= target
    let mut hi = 1.0; // h(hi) = 0 <= target
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let value = binary_entropy(mid).expect("mid in [0,1]");
        if value >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(2.0 * (0.5 * (lo + hi)) - 1.0)
}
