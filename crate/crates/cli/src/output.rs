//! CSV writers, schema checks and the run summary.

use std::fs;
use std::path::{Path, PathBuf};

use blowup_core::diagnostics::SeriesRecord;
use serde::Serialize;

use crate::error::CliError;

pub const PROFILE_HEADER: &[&str] = &["xi", "theta"];
pub const SERIES_HEADER: &[&str] = &["t", "umax", "xs", "xf", "X", "tau", "nnodes", "gamma", "dev"];
pub const SNAPSHOT_HEADER: &[&str] = &["x", "u"];
pub const CONVERGENCE_HEADER: &[&str] = &["h", "error", "interior_error"];

/// Shortest round-trip decimal form, identical on every platform.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// Files written by a run, each with its declared header.
#[derive(Debug, Default)]
pub struct Outputs {
    files: Vec<(PathBuf, &'static [&'static str])>,
}

impl Outputs {
    pub fn write(
        &mut self,
        path: &Path,
        header: &'static [&'static str],
        rows: impl IntoIterator<Item = Vec<String>>,
    ) -> Result<(), CliError> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush()?;
        self.files.push((path.to_path_buf(), header));
        Ok(())
    }

    pub fn profile(&mut self, path: &Path, xi: &[f64], theta: &[f64]) -> Result<(), CliError> {
        let rows = xi.iter().zip(theta).map(|(&x, &t)| vec![fmt_f64(x), fmt_f64(t)]);
        self.write(path, PROFILE_HEADER, rows)
    }

    pub fn snapshot(&mut self, path: &Path, x: &[f64], u: &[f64]) -> Result<(), CliError> {
        let rows = x.iter().zip(u).map(|(&a, &b)| vec![fmt_f64(a), fmt_f64(b)]);
        self.write(path, SNAPSHOT_HEADER, rows)
    }

    pub fn series(&mut self, path: &Path, records: &[SeriesRecord<f64>]) -> Result<(), CliError> {
        let rows = records.iter().map(|r| {
            vec![
                fmt_f64(r.t),
                fmt_f64(r.u_max),
                fmt_f64(r.semi_width),
                fmt_f64(r.front),
                fmt_f64(r.x_edge),
                fmt_f64(r.tau),
                r.n_nodes.to_string(),
                fmt_f64(r.gamma),
                fmt_f64(r.deviation),
            ]
        });
        self.write(path, SERIES_HEADER, rows)
    }

    pub fn paths(&self) -> impl Iterator<Item = &Path> {
        self.files.iter().map(|(p, _)| p.as_path())
    }

    /// Re-reads every file and checks it against its header.
    pub fn validate(&self) -> Result<(), CliError> {
        for (path, header) in &self.files {
            validate_csv(path, header)?;
        }
        Ok(())
    }
}

/// Header matches exactly, every row has one numeric field per column
/// (`NaN` allowed for undefined observables) and there is at least one row.
pub fn validate_csv(path: &Path, header: &[&str]) -> Result<usize, CliError> {
    let fail = |msg: String| CliError::Output(format!("{}: {msg}", path.display()));
    let mut r = csv::Reader::from_path(path)?;
    let found: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if found != header {
        return Err(fail(format!("header {found:?}, expected {header:?}")));
    }
    let mut rows = 0;
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        for (col, field) in header.iter().zip(rec.iter()) {
            if field.parse::<f64>().is_err() {
                return Err(fail(format!("row {}: column {col} = '{field}' is not a number", i + 1)));
            }
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(fail("no data rows".into()));
    }
    Ok(rows)
}

/// Structured run summary, written as JSON.
#[derive(Debug, Serialize)]
pub struct Summary {
    pub scenario: String,
    pub status: &'static str,
    pub params: SummaryParams,
    pub regime: String,
    pub results: serde_json::Value,
    pub errors: Vec<String>,
    pub outputs: Vec<String>,
    pub timings_seconds: serde_json::Map<String, serde_json::Value>,
}

#[derive(Debug, Serialize)]
pub struct SummaryParams {
    pub sigma: f64,
    pub beta: f64,
    pub dim: usize,
    pub t0: f64,
}

impl Summary {
    pub fn write(&self, dir: &Path) -> Result<PathBuf, CliError> {
        fs::create_dir_all(dir)?;
        let path = dir.join("summary.json");
        let text = serde_json::to_string_pretty(self).map_err(|e| CliError::Output(e.to_string()))?;
        fs::write(&path, text + "\n")?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, 1.0 / 3.0, 1e-300, 2.5e17, -0.0] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
        assert_eq!(fmt_f64(f64::NAN), "NaN");
        assert_eq!(fmt_f64(1.0), "1.0");
    }

    #[test]
    fn schema_checks() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = Outputs::default();
        let p = dir.path().join("a/profile.csv");
        out.profile(&p, &[0.0, 0.5], &[1.0, 0.25]).unwrap();
        out.validate().unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "xi,theta\n0.0,1.0\n0.5,0.25\n");
        fs::write(&p, "xi,theta\n0.0,abc\n").unwrap();
        assert!(out.validate().unwrap_err().to_string().contains("theta"));
        fs::write(&p, "xi,u\n0.0,1.0\n").unwrap();
        assert!(out.validate().is_err());
        fs::write(&p, "xi,theta\n").unwrap();
        assert!(out.validate().unwrap_err().to_string().contains("no data rows"));
    }
}
