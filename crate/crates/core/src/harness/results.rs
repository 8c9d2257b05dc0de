use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MANIFEST_SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    RelError,
    Rmse,
    Iterations,
    WallMs,
    ThresholdP,
    MaxIncoherence,
    /// Least-squares constant of a fitted scaling law.
    FittedC,
    /// Rank returned by a rank-selection heuristic.
    ChosenRank,
}

impl Metric {
    /// Timing metrics vary from run to run; everything else is reproducible.
    pub fn is_timing(self) -> bool {
        self == Metric::WallMs
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("metric serializes");
        f.write_str(s.as_str().expect("unit variant"))
    }
}

/// One measured value. `params` is a `;`-separated `key=value` list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub params: String,
    pub metric: Metric,
    pub value: f64,
    pub trial: usize,
    pub seed: u64,
}

impl ResultRow {
    pub fn new(experiment: &str, params: String, metric: Metric, value: f64, trial: usize, seed: u64) -> Self {
        ResultRow {
            experiment: experiment.to_string(),
            params,
            metric,
            value,
            trial,
            seed,
        }
    }
}

/// Formats `key=value` pairs in the given order.
pub fn params(pairs: &[(&str, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
}

/// Row sets compared on everything except timing values.
pub fn same_results(a: &[ResultRow], b: &[ResultRow]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| {
            x.experiment == y.experiment
                && x.params == y.params
                && x.metric == y.metric
                && x.trial == y.trial
                && x.seed == y.seed
                && (x.metric.is_timing() || x.value.to_bits() == y.value.to_bits())
        })
}

/// JSON sidecar describing a result file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: u32,
    pub library: String,
    pub version: String,
    /// Supplied by the caller so identical runs can produce identical files.
    pub timestamp: String,
    pub experiment: String,
    pub config: serde_json::Value,
    pub rows: usize,
    pub passed: bool,
    pub failures: Vec<String>,
}

impl Manifest {
    pub fn new(experiment: &str, config: serde_json::Value, timestamp: String, failures: Vec<String>) -> Self {
        Manifest {
            schema: MANIFEST_SCHEMA,
            library: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp,
            experiment: experiment.to_string(),
            config,
            rows: 0,
            passed: failures.is_empty(),
            failures,
        }
    }
}

/// Where the manifest for `csv_path` lives.
pub fn manifest_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

fn validate_rows(rows: &[ResultRow]) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::InvalidArgument("no result rows to write".into()));
    }
    let mut seen = HashSet::new();
    for r in rows {
        if !r.value.is_finite() {
            return Err(Error::NonFinite("result value"));
        }
        if !seen.insert((&r.experiment, &r.params, r.metric, r.trial)) {
            return Err(Error::InvalidArgument(format!(
                "duplicate row {} [{}] {} trial {}",
                r.experiment, r.params, r.metric, r.trial
            )));
        }
    }
    Ok(())
}

/// Writes `rows` as CSV to `path` and `manifest` beside it. Output bytes
/// depend only on the rows and manifest contents.
pub fn emit_results(rows: &[ResultRow], path: &Path, manifest: &Manifest) -> Result<()> {
    validate_rows(rows)?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = csv::Writer::from_writer(file);
    for r in rows {
        writer.serialize(r)?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;

    let manifest = Manifest {
        rows: rows.len(),
        ..manifest.clone()
    };
    let json_path = manifest_path(path);
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(&json_path, text).map_err(|e| Error::io(&json_path, e))?;
    Ok(())
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    reader.deserialize().map(|r| r.map_err(Error::from)).collect()
}

pub fn read_manifest(csv_path: &Path) -> Result<Manifest> {
    let path = manifest_path(csv_path);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(trial: usize, value: f64) -> ResultRow {
        ResultRow::new("demo", params(&[("n", "40".into()), ("k", "2".into())]), Metric::Rmse, value, trial, 7)
    }

    fn manifest() -> Manifest {
        Manifest::new("demo", serde_json::json!({"n": 40}), "0".into(), vec![])
    }

    #[test]
    fn single_row_file_has_two_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        emit_results(&[row(0, 0.5)], &path, &manifest()).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert_eq!(text.lines().next().unwrap(), "experiment,params,metric,value,trial,seed");
        assert_eq!(read_manifest(&path).unwrap().schema, 1);
    }

    #[test]
    fn byte_stable_and_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let rows: Vec<ResultRow> = (0..10_000).map(|t| row(t, (t as f64).sqrt() / 7.0)).collect();
        let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
        emit_results(&rows, &a, &manifest()).unwrap();
        emit_results(&rows, &b, &manifest()).unwrap();
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
        assert_eq!(fs::read(manifest_path(&a)).unwrap(), fs::read(manifest_path(&b)).unwrap());
        assert_eq!(read_results(&a).unwrap(), rows);
    }

    #[test]
    fn rejects_empty_duplicate_and_nonfinite() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        assert!(emit_results(&[], &path, &manifest()).is_err());
        assert!(emit_results(&[row(0, 1.0), row(0, 2.0)], &path, &manifest()).is_err());
        assert!(emit_results(&[row(0, f64::NAN)], &path, &manifest()).is_err());
    }

    #[test]
    fn io_error_names_path() {
        let err = read_results(Path::new("/nonexistent/dir/file.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/dir/file.csv"));
    }
}
