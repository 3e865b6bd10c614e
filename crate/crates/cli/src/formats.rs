//! Text output formats: the deployment table, the metrics CSV, the sparse
//! grid dump, and the JSON run summary. All floats are printed with Rust's
//! shortest round-trip formatting, so identical runs produce identical
//! bytes.

use aircomp_core::learning::RoundDeviceMetrics;
use aircomp_core::oac::{GridSymbols, ResourceMap};
use aircomp_core::topology::Deployment;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("deployment table line {line}: {reason}")]
    Malformed { line: usize, reason: String },
}

/// One row per node: `kind  id  x_m  y_m`, tab-separated.
pub fn format_deployment(dep: &Deployment) -> String {
    let mut out = String::from("kind\tid\tx_m\ty_m\n");
    for (i, p) in dep.es_positions.iter().enumerate() {
        out.push_str(&format!("ES\t{i}\t{}\t{}\n", p[0], p[1]));
    }
    for (i, p) in dep.ed_positions.iter().enumerate() {
        out.push_str(&format!("ED\t{i}\t{}\t{}\n", p[0], p[1]));
    }
    out
}

/// Parses [`format_deployment`] output (the header row is optional).
pub fn parse_deployment(text: &str, inter_site_distance: f64) -> Result<Deployment, FormatError> {
    let mut dep = Deployment {
        es_positions: Vec::new(),
        ed_positions: Vec::new(),
        inter_site_distance,
    };
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim_end();
        if line.is_empty() || line.starts_with("kind\t") {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(FormatError::Malformed {
                line: lineno + 1,
                reason: format!("expected 4 tab-separated fields, got {}", fields.len()),
            });
        }
        let parse = |s: &str| -> Result<f64, FormatError> {
            s.parse().map_err(|_| FormatError::Malformed {
                line: lineno + 1,
                reason: format!("bad coordinate {s:?}"),
            })
        };
        let point = [parse(fields[2])?, parse(fields[3])?];
        match fields[0] {
            "ES" => dep.es_positions.push(point),
            "ED" => dep.ed_positions.push(point),
            other => {
                return Err(FormatError::Malformed {
                    line: lineno + 1,
                    reason: format!("unknown node kind {other:?}"),
                })
            }
        }
    }
    Ok(dep)
}

/// Metrics CSV with the header
/// `round,ed_id,acc_all,acc_personalized,mv_flip_fraction`.
pub fn format_metrics_csv(rows: &[RoundDeviceMetrics]) -> String {
    let mut out = String::from("round,ed_id,acc_all,acc_personalized,mv_flip_fraction\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.round, row.device, row.acc_all, row.acc_personalized, row.mv_flip_fraction
        ));
    }
    out
}

/// Sparse grid dump: `m  n  re  im` per active element, tab-separated.
pub fn format_grid_dump(grid: &GridSymbols, map: &ResourceMap) -> String {
    let mut out = String::from("m\tn\tre\tim\n");
    for (m, n, symbol) in grid.active_elements(map) {
        out.push_str(&format!("{m}\t{n}\t{}\t{}\n", symbol.re, symbol.im));
    }
    out
}

/// Serializes any summary struct as pretty JSON with a trailing newline.
/// Struct field order is declaration order, which keeps key order stable.
pub fn to_summary_json<T: Serialize>(summary: &T) -> String {
    let mut text = serde_json::to_string_pretty(summary).expect("serializable summary");
    text.push('\n');
    text
}
