//! Per-trial CSV, summary JSON and plot-ready TSV.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{HarnessError, Result};
use crate::trials::TrialResult;

pub const TRIALS_CSV: &str = "trials.csv";
pub const SUMMARY_JSON: &str = "summary.json";
pub const CURVES_TSV: &str = "curves.tsv";

/// Aggregate over the repetitions of one (trial, estimator) pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub trial: String,
    pub estimator: String,
    pub k: usize,
    pub epsilon: f64,
    pub repetitions: usize,
    pub median_error: f64,
    pub mean_error: f64,
    pub max_error: f64,
    pub median_iterations: f64,
    pub median_wall_ms: f64,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Rows in order of first appearance of each (trial, estimator) pair.
pub fn summarize(results: &[TrialResult]) -> Vec<SummaryRow> {
    let mut order: Vec<(String, String)> = Vec::new();
    let mut groups: BTreeMap<(String, String), Vec<&TrialResult>> = BTreeMap::new();
    for r in results {
        let key = (r.trial.clone(), r.estimator.clone());
        if !groups.contains_key(&key) {
            order.push(key.clone());
        }
        groups.entry(key).or_default().push(r);
    }
    order
        .into_iter()
        .map(|key| {
            let g = &groups[&key];
            let errors: Vec<f64> = g.iter().map(|r| r.error_l2).collect();
            SummaryRow {
                trial: key.0.clone(),
                estimator: key.1.clone(),
                k: g[0].k,
                epsilon: g[0].epsilon,
                repetitions: g.len(),
                mean_error: errors.iter().sum::<f64>() / errors.len() as f64,
                max_error: errors.iter().copied().fold(0.0, f64::max),
                median_error: median(errors),
                median_iterations: median(g.iter().map(|r| r.iterations as f64).collect()),
                median_wall_ms: median(g.iter().map(|r| r.wall_ms).collect()),
            }
        })
        .collect()
}

fn create(path: &Path) -> Result<std::fs::File> {
    std::fs::File::create(path).map_err(|e| HarnessError::io(path.display().to_string(), e))
}

pub fn write_csv(results: &[TrialResult], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    for r in results {
        w.serialize(r)
            .map_err(|e| HarnessError::Data(format!("{}: {e}", path.display())))?;
    }
    w.flush()
        .map_err(|e| HarnessError::io(path.display().to_string(), e))
}

pub fn write_summary(rows: &[SummaryRow], path: &Path) -> Result<()> {
    let mut f = create(path)?;
    serde_json::to_writer_pretty(&mut f, rows).map_err(|e| HarnessError::Data(e.to_string()))?;
    writeln!(f).map_err(|e| HarnessError::io(path.display().to_string(), e))
}

/// Median error against `k` and the outlier fraction, one line per summary row.
pub fn write_tsv(rows: &[SummaryRow], path: &Path) -> Result<()> {
    let mut f = std::io::BufWriter::new(create(path)?);
    let io = |e| HarnessError::io(path.display().to_string(), e);
    writeln!(f, "trial\testimator\tk\tepsilon\tmedian_error").map_err(io)?;
    for r in rows {
        writeln!(
            f,
            "{}\t{}\t{}\t{}\t{}",
            r.trial, r.estimator, r.k, r.epsilon, r.median_error
        )
        .map_err(io)?;
    }
    f.flush().map_err(io)
}

/// Writes the CSV and summary (and the TSV when asked) into `dir`.
pub fn write_all(results: &[TrialResult], dir: &Path, tsv: bool) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir.display().to_string(), e))?;
    write_csv(results, &dir.join(TRIALS_CSV))?;
    let rows = summarize(results);
    write_summary(&rows, &dir.join(SUMMARY_JSON))?;
    if tsv {
        write_tsv(&rows, &dir.join(CURVES_TSV))?;
    }
    Ok(())
}
