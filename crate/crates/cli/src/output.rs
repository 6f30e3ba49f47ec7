use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use serde::Serialize;
use translator_core::analysis::{CheckResult, Series};
use translator_core::Error;

use crate::config::RunConfig;
use crate::{RunError, Verdict};

#[derive(Serialize)]
struct Report<'a> {
    command: &'a str,
    config: &'a RunConfig,
    results: &'a [CheckResult],
    series_files: &'a [String],
}

/// Collects results and files for one run, then writes `report.json`.
pub struct Output {
    dir: PathBuf,
    command: &'static str,
    pub results: Vec<CheckResult>,
    files: Vec<String>,
}

fn io_err(e: impl std::fmt::Display) -> RunError {
    RunError::Config(format!("writing output: {e}"))
}

impl Output {
    pub fn new(dir: PathBuf, command: &'static str) -> Result<Self, RunError> {
        fs::create_dir_all(&dir).map_err(io_err)?;
        Ok(Output {
            dir,
            command,
            results: Vec::new(),
            files: Vec::new(),
        })
    }

    /// Writes `name` inside the output directory and lists it in the report.
    pub fn file<F>(&mut self, name: &str, write: F) -> Result<(), RunError>
    where
        F: FnOnce(&mut BufWriter<File>) -> Result<(), Error>,
    {
        let mut w = BufWriter::new(File::create(self.dir.join(name)).map_err(io_err)?);
        write(&mut w).map_err(io_err)?;
        w.flush().map_err(io_err)?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn series(&mut self, name: &str, series: &Series) -> Result<(), RunError> {
        self.file(name, |w| series.write_csv(w))
    }

    pub fn push(&mut self, r: CheckResult) {
        self.results.push(r);
    }

    pub fn finish(self, config: &RunConfig) -> Result<Verdict, RunError> {
        let report = Report {
            command: self.command,
            config,
            results: &self.results,
            series_files: &self.files,
        };
        let mut text = serde_json::to_string_pretty(&report).map_err(io_err)?;
        text.push('\n');
        fs::write(self.dir.join("report.json"), text).map_err(io_err)?;
        let failed = self.results.iter().any(|r| r.pass == Some(false));
        Ok(if failed { Verdict::Fail } else { Verdict::Pass })
    }

    /// Records a degeneracy as a failed result and converts it for the
    /// exit status.
    pub fn fail(&mut self, config: &RunConfig, check: &str, h: f64, err: Error) -> RunError {
        let (value, location) = match &err {
            Error::NotSpacelike { lambda_min, location } => (*lambda_min, location.clone()),
            _ => (f64::NAN, Vec::new()),
        };
        self.push(CheckResult {
            check: check.into(),
            h,
            tolerance: config.tolerances.delta_space,
            worst_margin: value - config.tolerances.delta_space,
            worst_value: value,
            worst_location: location,
            pass: Some(false),
            notes: vec![err.to_string()],
            series: Series::default(),
        });
        RunError::from(err)
    }

    /// Writes the report for a finished or degenerate run.
    pub fn complete(self, config: &RunConfig, outcome: Result<(), RunError>) -> Result<Verdict, RunError> {
        match outcome {
            Ok(()) => self.finish(config),
            Err(e @ RunError::Degenerate(_)) => {
                self.finish(config)?;
                Err(e)
            }
            Err(e) => Err(e),
        }
    }
}

/// File name for a per-level artifact: `stem.ext` at level 0,
/// `stem_l{level}.ext` on refined grids.
pub fn level_name(stem: &str, ext: &str, level: usize) -> String {
    if level == 0 {
        format!("{stem}.{ext}")
    } else {
        format!("{stem}_l{level}.{ext}")
    }
}

/// An informational result carrying one number.
pub fn info(check: &str, h: f64, value: f64, location: Vec<f64>, notes: Vec<String>) -> CheckResult {
    CheckResult {
        check: check.into(),
        h,
        tolerance: f64::NAN,
        worst_margin: value,
        worst_value: value,
        worst_location: location,
        pass: None,
        notes,
        series: Series::default(),
    }
}

/// Observed orders between consecutive levels of `(h, error)` pairs.
pub fn order_results(check: &str, levels: &[(f64, f64)]) -> Vec<CheckResult> {
    levels
        .windows(2)
        .map(|w| {
            let p = translator_core::richardson::observed_order(w[0].1, w[1].1);
            info(
                check,
                w[1].0,
                p,
                Vec::new(),
                vec![format!("observed order from h = {:e} to h = {:e}", w[0].0, w[1].0)],
            )
        })
        .collect()
}
