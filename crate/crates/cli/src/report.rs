//! Comparison of a sweep CSV against an embedded reference table.

use qcycle::fmt::format_significant;

use crate::errors::CliError;
use crate::reftable::ReferenceTable;

/// Parsed columns of a sweep (or reference-shaped) CSV.
pub struct SimRows {
    /// Key column values, file order.
    pub keys: Vec<f64>,
    /// Discord column.
    pub discord: Vec<f64>,
    /// Final-coherence column.
    pub c_final: Vec<f64>,
}

/// Extract `key` (first column), `discord`, and `c_final` columns from a
/// CSV with named headers.
pub fn parse_sim_csv(text: &str) -> Result<SimRows, CliError> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::runtime("empty comparison input"))?;
    let columns: Vec<&str> = header.split(',').collect();
    let find = |name: &str| -> Result<usize, CliError> {
        columns.iter().position(|&c| c == name).ok_or_else(|| {
            CliError::runtime(format!("input is missing a {name:?} column"))
        })
    };
    let discord_col = find("discord")?;
    let c_final_col = find("c_final")?;

    let mut rows = SimRows {
        keys: Vec::new(),
        discord: Vec::new(),
        c_final: Vec::new(),
    };
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns.len() {
            return Err(CliError::runtime(format!(
                "line {}: expected {} fields, got {}",
                lineno + 2,
                columns.len(),
                fields.len()
            )));
        }
        let parse = |i: usize| -> Result<f64, CliError> {
            fields[i].parse().map_err(|_| {
                CliError::runtime(format!("line {}: bad number {:?}", lineno + 2, fields[i]))
            })
        };
        rows.keys.push(parse(0)?);
        rows.discord.push(parse(discord_col)?);
        rows.c_final.push(parse(c_final_col)?);
    }
    if rows.keys.is_empty() {
        return Err(CliError::runtime("comparison input has no data rows"));
    }
    Ok(rows)
}

/// Thresholds applied to the RMS deviations.
#[derive(Clone, Copy, Debug)]
pub struct Thresholds {
    /// Largest acceptable RMS deviation of the discord column.
    pub max_rms_discord: f64,
    /// Largest acceptable RMS deviation of the final-coherence column.
    pub max_rms_cfinal: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            max_rms_discord: 0.10,
            max_rms_cfinal: 0.12,
        }
    }
}

/// The rendered comparison plus whether the thresholds were met.
pub struct Comparison {
    /// Deterministic text report.
    pub text: String,
    /// True iff both RMS deviations are within their thresholds.
    pub thresholds_met: bool,
}

fn rms(values: &[f64]) -> f64 {
    (values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64).sqrt()
}

/// Compare simulated rows against a reference table, row by row.
///
/// Keys must match the table's keys exactly, in table order.
pub fn compare(
    table: &ReferenceTable,
    sim: &SimRows,
    thresholds: &Thresholds,
) -> Result<Comparison, CliError> {
    if sim.keys.len() != table.rows.len() {
        return Err(CliError::runtime(format!(
            "{} reference table has {} rows but the input has {}",
            table.id,
            table.rows.len(),
            sim.keys.len()
        )));
    }
    for (row, &key) in table.rows.iter().zip(&sim.keys) {
        if (row.key - key).abs() > 1e-9 {
            return Err(CliError::runtime(format!(
                "key mismatch: reference {} vs input {key}",
                row.key
            )));
        }
    }

    let nine = |v: f64| format_significant(v, 9);
    let mut text = format!("table {} rows {}\n", table.id, table.rows.len());
    if table.id == "pure" {
        text.push_str(
            "note pure-table initial coherence is computed from the preparation angle, not measured\n",
        );
    }
    let mut discord_devs = Vec::new();
    let mut c_final_devs = Vec::new();
    for (i, row) in table.rows.iter().enumerate() {
        let discord_dev = sim.discord[i] - row.discord;
        let c_final_dev = sim.c_final[i] - row.c_final;
        discord_devs.push(discord_dev);
        c_final_devs.push(c_final_dev);
        text.push_str(&format!(
            "row key={} discord ref={} sim={} dev={} | c_final ref={} sim={} dev={}\n",
            nine(row.key),
            nine(row.discord),
            nine(sim.discord[i]),
            nine(discord_dev),
            nine(row.c_final),
            nine(sim.c_final[i]),
            nine(c_final_dev),
        ));
    }

    let mut summarize = |name: &str, devs: &[f64], limit: f64| -> bool {
        let rms_value = rms(devs);
        let (max_index, max_value) = devs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).expect("finite"))
            .expect("non-empty");
        text.push_str(&format!(
            "summary {name} rms={} max={} at key={}\n",
            nine(rms_value),
            nine(max_value.abs()),
            nine(table.rows[max_index].key),
        ));
        let met = rms_value <= limit;
        text.push_str(&format!(
            "threshold {name} rms<={}: {}\n",
            nine(limit),
            if met { "PASS" } else { "FAIL" }
        ));
        met
    };
    let discord_ok = summarize("discord", &discord_devs, thresholds.max_rms_discord);
    let c_final_ok = summarize("c_final", &c_final_devs, thresholds.max_rms_cfinal);

    Ok(Comparison {
        text,
        thresholds_met: discord_ok && c_final_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reftable::reference_table;

    #[test]
    fn table_compared_to_itself_is_all_zeros() {
        let table = reference_table("pure").unwrap();
        let csv = include_str!("../data/reference_pure.csv");
        let sim = parse_sim_csv(csv).unwrap();
        let comparison = compare(&table, &sim, &Thresholds::default()).unwrap();
        assert!(comparison.thresholds_met);
        // Ties resolve to the last row.
        assert!(comparison.text.contains("summary discord rms=0 max=0 at key=44"));
        assert!(comparison.text.contains("threshold discord rms<=0.1: PASS"));
        for line in comparison.text.lines() {
            if line.starts_with("row ") {
                assert!(
                    line.contains("dev=0 |") && line.ends_with("dev=0"),
                    "nonzero deviation in {line}"
                );
            }
        }
    }

    #[test]
    fn key_mismatch_is_rejected() {
        let table = reference_table("mixed").unwrap();
        let sim = parse_sim_csv(include_str!("../data/reference_pure.csv")).unwrap();
        assert!(compare(&table, &sim, &Thresholds::default()).is_err());
    }

    #[test]
    fn threshold_violations_are_flagged() {
        let table = reference_table("pure").unwrap();
        let mut sim = parse_sim_csv(include_str!("../data/reference_pure.csv")).unwrap();
        for value in &mut sim.discord {
            *value += 0.5;
        }
        let comparison = compare(&table, &sim, &Thresholds::default()).unwrap();
        assert!(!comparison.thresholds_met);
        assert!(comparison.text.contains("threshold discord rms<=0.1: FAIL"));
        assert!(comparison.text.contains("threshold c_final rms<=0.12: PASS"));
    }

    #[test]
    fn malformed_input_is_rejected() {
        assert!(parse_sim_csv("").is_err());
        assert!(parse_sim_csv("key,discord\n1,0.5\n").is_err());
        assert!(parse_sim_csv("key,discord,c_final\n1,0.5\n").is_err());
        assert!(parse_sim_csv("key,discord,c_final\n1,zebra,0.5\n").is_err());
        assert!(parse_sim_csv("key,discord,c_final\n").is_err());
    }
}
