//! Artifact collection and deterministic CSV/JSON emission.
//!
//! CSV floats print in Rust's shortest round-trip form and rows are emitted
//! in a fixed order, so identical configs produce byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::stats::BinomialEstimate;

use super::params::{CliError, CliResult};

/// One aggregate result row: the spec'd CSV schema.
#[derive(Debug, Clone, Serialize)]
pub struct AggRow {
    pub experiment: String,
    pub l: String,
    pub parameterization: String,
    pub trials: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub bound: f64,
    pub pass: bool,
}

impl AggRow {
    /// Row for a Monte-Carlo lower-bound check at 3-sigma Wilson.
    pub fn lower_bound(
        experiment: &str,
        l: impl ToString,
        parameterization: impl Into<String>,
        est: BinomialEstimate,
        bound: f64,
    ) -> Self {
        Self {
            experiment: experiment.to_string(),
            l: l.to_string(),
            parameterization: parameterization.into(),
            trials: est.trials,
            estimate: est.p_hat(),
            stderr: est.stderr(),
            bound,
            pass: est.meets_lower_bound(bound),
        }
    }

    /// Row for an exact check: pass iff `estimate <= bound`.
    pub fn deviation(
        experiment: &str,
        l: impl ToString,
        parameterization: impl Into<String>,
        trials: u64,
        estimate: f64,
        bound: f64,
    ) -> Self {
        Self {
            experiment: experiment.to_string(),
            l: l.to_string(),
            parameterization: parameterization.into(),
            trials,
            estimate,
            stderr: 0.0,
            bound,
            pass: estimate <= bound,
        }
    }
}

/// Per-trial series destined for its own CSV file.
#[derive(Debug, Clone)]
pub struct TrialSeries {
    /// File tag, e.g. `l6_d1`.
    pub tag: String,
    /// Value column name: `gap` or `tvd`.
    pub column: &'static str,
    pub values: Vec<f64>,
}

/// Everything one experiment run wants written to disk.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub rows: Vec<AggRow>,
    pub summaries: Vec<serde_json::Value>,
    pub trial_series: Vec<TrialSeries>,
}

impl Artifacts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_summary<T: Serialize>(&mut self, value: &T) {
        self.summaries
            .push(serde_json::to_value(value).expect("summary serializes"));
    }

    pub fn overall_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents)
        .map_err(|e| CliError(format!("cannot write {}: {e}", path.display())))
}

/// Write the aggregate CSV, per-trial CSVs, and the summary JSON for one
/// experiment run. Returns the paths written.
pub fn write_artifacts(
    out_dir: &Path,
    experiment: &str,
    params: &std::collections::BTreeMap<String, String>,
    artifacts: &Artifacts,
) -> CliResult<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)
        .map_err(|e| CliError(format!("cannot create {}: {e}", out_dir.display())))?;
    let mut written = Vec::new();

    let mut csv = String::from("experiment,l,parameterization,trials,estimate,stderr,bound,pass\n");
    for row in &artifacts.rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            row.experiment,
            row.l,
            row.parameterization,
            row.trials,
            row.estimate,
            row.stderr,
            row.bound,
            row.pass
        ));
    }
    let agg_path = out_dir.join(format!("{experiment}.csv"));
    write_file(&agg_path, &csv)?;
    written.push(agg_path);

    for series in &artifacts.trial_series {
        let mut csv = format!("trial,{}\n", series.column);
        for (trial, value) in series.values.iter().enumerate() {
            csv.push_str(&format!("{trial},{value}\n"));
        }
        let path = out_dir.join(format!("{experiment}_trials_{}.csv", series.tag));
        write_file(&path, &csv)?;
        written.push(path);
    }

    let summary = serde_json::json!({
        "experiment": experiment,
        "params": params,
        "configs": artifacts.summaries,
        "pass": artifacts.overall_pass(),
    });
    let json_path = out_dir.join(format!("{experiment}_summary.json"));
    write_file(
        &json_path,
        &format!("{}\n", serde_json::to_string_pretty(&summary).unwrap()),
    )?;
    written.push(json_path);

    Ok(written)
}
