//! Writes reports as pretty JSON and tables as CSV.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::error::{LabError, LabResult};
use crate::experiments::{Outcome, Table};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> LabError + '_ {
    move |source| LabError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_table(dir: &Path, table: &Table) -> LabResult<PathBuf> {
    let path = dir.join(&table.file);
    let csv_err = |source| LabError::Csv {
        path: path.clone(),
        source,
    };
    let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
    w.write_record(&table.header).map_err(csv_err)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|v| v.to_string())).map_err(csv_err)?;
    }
    w.flush().map_err(io_err(&path))?;
    Ok(path)
}

/// Writes `<name>.json` per report, every table, and `summary.json`.
/// Returns the written paths in order.
pub fn write_outcome(dir: &Path, outcome: &Outcome, seed: u64) -> LabResult<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    for r in &outcome.reports {
        let path = dir.join(format!("{}.json", r.name));
        let mut text = serde_json::to_string_pretty(r)?;
        text.push('\n');
        fs::write(&path, text).map_err(io_err(&path))?;
        written.push(path);
    }
    for t in &outcome.tables {
        written.push(write_table(dir, t)?);
    }
    let summary = json!({
        "seed": seed,
        "passed": outcome.passed(),
        "reports": outcome.reports.iter().map(|r| json!({
            "name": r.name,
            "experiment": r.experiment,
            "applicable": r.applicable,
            "passed": r.passed,
            "assertions": r.assertions.len(),
            "failed": r.failures().count(),
        })).collect::<Vec<_>>(),
    });
    let path = dir.join("summary.json");
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    fs::write(&path, text).map_err(io_err(&path))?;
    written.push(path);
    Ok(written)
}
