#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use serde_json::Value;

pub const EQ16_U1: &str = "ln(1+exp(2*x1))-x1";

pub fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

/// Outcome of one invocation of the binary.
pub struct Run {
    pub code: i32,
    pub report: Option<Value>,
    pub out: PathBuf,
    pub elapsed: Duration,
    pub stderr: String,
}

impl Run {
    pub fn report(&self) -> &Value {
        self.report.as_ref().expect("report.json was written")
    }

    pub fn results(&self, check: &str) -> Vec<&Value> {
        self.report()["results"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|r| r["check"] == check)
            .collect()
    }

    pub fn result(&self, check: &str) -> &Value {
        self.results(check)
            .into_iter()
            .next()
            .unwrap_or_else(|| panic!("no {check} result"))
    }

    pub fn read(&self, name: &str) -> String {
        fs::read_to_string(self.out.join(name)).unwrap()
    }

    pub fn series(&self, name: &str) -> Vec<SeriesRow> {
        parse_series(&self.read(name))
    }
}

pub struct SeriesRow {
    pub x: Vec<f64>,
    pub quantity: String,
    pub value: f64,
}

pub fn parse_series(text: &str) -> Vec<SeriesRow> {
    text.lines()
        .skip(1)
        .map(|line| {
            let fields: Vec<&str> = line.split(',').collect();
            let k = fields.len() - 2;
            SeriesRow {
                x: fields[..k].iter().map(|v| v.parse().unwrap()).collect(),
                quantity: fields[k].to_string(),
                value: fields[k + 1].parse().unwrap(),
            }
        })
        .collect()
}

/// Runs `translator <cmd> --config <config> --out <out> <extra>`.
pub fn run_file(cmd: &str, config: &Path, out: &Path, extra: &[&str]) -> Run {
    let start = Instant::now();
    let output = Command::new(env!("CARGO_BIN_EXE_translator"))
        .arg(cmd)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .expect("binary runs");
    let elapsed = start.elapsed();
    let report = fs::read_to_string(out.join("report.json"))
        .ok()
        .map(|t| serde_json::from_str(&t).expect("report.json parses"));
    Run {
        code: output.status.code().expect("exit code"),
        report,
        out: out.to_path_buf(),
        elapsed,
        stderr: String::from_utf8_lossy(&output.stderr).into_owned(),
    }
}

/// Writes `config` into `dir/<name>.json` and runs it with output in
/// `dir/<name>`.
pub fn run_json(cmd: &str, config: &Value, dir: &Path, name: &str, extra: &[&str]) -> Run {
    let path = dir.join(format!("{name}.json"));
    fs::write(&path, serde_json::to_string_pretty(config).unwrap()).unwrap();
    run_file(cmd, &path, &dir.join(name), extra)
}

pub fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN)
}

/// The `ln(1 + e^{2 x1}) - x1, mu x2` translator on `[-r, r]^2` with `nodes` per side.
pub fn eq16(mu: f64, r: f64, nodes: usize) -> Value {
    serde_json::json!({
        "signature": {"m": 2, "n": 2},
        "functions": [EQ16_U1, format!("{mu}*x2")],
        "translator": {"a": [0, 1], "b": [1, mu]},
        "domain": {"lo": [-r, -r], "hi": [r, r]},
        "shape": [nodes, nodes],
        "tolerances": {"residual": 1e-10},
        "jets": "analytic"
    })
}

/// The affine plane `(0.5 x1, 0.3 x2)` with translating vector `(a, b)`.
pub fn plane(a: [f64; 2], b: [f64; 2], r: f64, nodes: usize) -> Value {
    serde_json::json!({
        "signature": {"m": 2, "n": 2},
        "functions": ["0.5*x1", "0.3*x2"],
        "translator": {"a": a, "b": b},
        "domain": {"lo": [-r, -r], "hi": [r, r]},
        "shape": [nodes, nodes],
        "jets": "analytic"
    })
}

/// Every file below `dir`, relative path and contents, sorted by path.
pub fn tree(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}
