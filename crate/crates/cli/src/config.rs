use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use translator_core::solver::{InitialGuess, NewtonOptions, TranslatorProblem};
use translator_core::{Execution, Expression, GridField, GridSpec, TranslatorSpec};

use crate::RunError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Signature {
    pub m: usize,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TranslatorConfig {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Domain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Largest translator residual `verify` accepts.
    pub residual: f64,
    pub delta_space: f64,
    pub analytic: f64,
    /// Largest residual the proposition checks accept as a translator.
    pub translator: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            residual: 1e-8,
            delta_space: 1e-9,
            analytic: 1e-10,
            translator: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Jets {
    #[default]
    Analytic,
    Fd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GuessConfig {
    AffineFit,
    Expressions {
        functions: Vec<String>,
    },
    Random {
        #[serde(default)]
        seed: u64,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
}

fn default_amplitude() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxConfig {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub shape: Vec<usize>,
}

/// Nested boxes, either listed or as centred cubes `[-r, r]^m` at spacing `h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boxes: Option<Vec<BoxConfig>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveConfig {
    /// Dirichlet data; `functions` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary: Option<Vec<String>>,
    pub initial_guess: GuessConfig,
    pub residual_tol: f64,
    pub max_iter: usize,
    pub max_backtracks: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        let d = NewtonOptions::default();
        SolveConfig {
            boundary: None,
            initial_guess: GuessConfig::AffineFit,
            residual_tol: d.residual_tol,
            max_iter: d.max_iter,
            max_backtracks: d.max_backtracks,
            sweep: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    Prop31,
    Prop32,
    Decay,
    GaussImage,
    GradientEstimate,
    Rigidity,
}

impl CheckName {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::Prop31 => "prop31",
            CheckName::Prop32 => "prop32",
            CheckName::Decay => "decay",
            CheckName::GaussImage => "gauss_image",
            CheckName::GradientEstimate => "gradient_estimate",
            CheckName::Rigidity => "rigidity",
        }
    }
}

/// What `diagnose` runs on: the configured functions or grid file, or the
/// output of the configured solve (the last box of a sweep).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    #[default]
    Functions,
    Solve,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnoseConfig {
    pub checks: Vec<CheckName>,
    pub epsilon_probe: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
    pub boundary_exclusion: usize,
    pub source: Source,
}

impl Default for DiagnoseConfig {
    fn default() -> Self {
        DiagnoseConfig {
            checks: vec![
                CheckName::Prop31,
                CheckName::Prop32,
                CheckName::Decay,
                CheckName::GaussImage,
                CheckName::GradientEstimate,
            ],
            epsilon_probe: 0.5,
            r0: None,
            boundary_exclusion: 3,
            source: Source::Functions,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub signature: Signature,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functions: Option<Vec<String>>,
    /// CSV of grid samples (`node` column then one column per function).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_file: Option<PathBuf>,
    pub translator: TranslatorConfig,
    pub domain: Domain,
    pub shape: Vec<usize>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub jets: Jets,
    #[serde(default)]
    pub execution: Execution,
    /// Extra levels of grid halving for convergence studies.
    #[serde(default)]
    pub h_refine: usize,
    #[serde(default)]
    pub solve: SolveConfig,
    #[serde(default)]
    pub diagnose: DiagnoseConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

fn config_err(msg: impl Into<String>) -> RunError {
    RunError::Config(msg.into())
}

fn check_len(what: &str, got: usize, want: usize) -> Result<(), RunError> {
    if got != want {
        return Err(config_err(format!("{what}: expected {want} entries, got {got}")));
    }
    Ok(())
}

pub fn parse_functions(src: &[String], m: usize) -> Result<Vec<Expression>, RunError> {
    src.iter()
        .enumerate()
        .map(|(a, s)| Expression::parse(s, m).map_err(|e| config_err(format!("function {}: {e}", a + 1))))
        .collect()
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))
    }

    /// Schema-level consistency of dimensions and options.
    pub fn validate(&self) -> Result<(), RunError> {
        let Signature { m, n } = self.signature;
        if m == 0 || n == 0 {
            return Err(config_err("signature needs m >= 1 and n >= 1"));
        }
        match (&self.functions, &self.grid_file) {
            (Some(f), None) => check_len("functions", f.len(), n)?,
            (None, Some(_)) => {
                if self.jets == Jets::Analytic {
                    return Err(config_err("a grid file only provides finite-difference jets; set \"jets\": \"fd\""));
                }
            }
            (Some(_), Some(_)) => return Err(config_err("give either functions or grid_file, not both")),
            (None, None) => return Err(config_err("one of functions or grid_file is required")),
        }
        check_len("translator.a", self.translator.a.len(), m)?;
        check_len("translator.b", self.translator.b.len(), n)?;
        check_len("domain.lo", self.domain.lo.len(), m)?;
        check_len("domain.hi", self.domain.hi.len(), m)?;
        check_len("shape", self.shape.len(), m)?;
        let t = &self.tolerances;
        for (name, v) in [
            ("tolerances.residual", t.residual),
            ("tolerances.delta_space", t.delta_space),
            ("tolerances.analytic", t.analytic),
            ("tolerances.translator", t.translator),
            ("solve.residual_tol", self.solve.residual_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(config_err(format!("{name} must be positive")));
            }
        }
        if let Some(b) = &self.solve.boundary {
            check_len("solve.boundary", b.len(), n)?;
        }
        if let GuessConfig::Expressions { functions } = &self.solve.initial_guess {
            check_len("solve.initial_guess.functions", functions.len(), n)?;
        }
        if let Some(s) = &self.solve.sweep {
            match (&s.boxes, &s.radii, s.h) {
                (Some(b), None, None) if !b.is_empty() => {}
                (None, Some(r), Some(h)) if !r.is_empty() && h > 0.0 => {}
                _ => return Err(config_err("solve.sweep needs either a non-empty `boxes` list or `radii` with `h`")),
            }
        }
        let d = &self.diagnose;
        if !(d.epsilon_probe.is_finite() && d.epsilon_probe >= 0.0) {
            return Err(config_err("diagnose.epsilon_probe must be non-negative"));
        }
        if d.checks.contains(&CheckName::Rigidity) && self.solve.sweep.is_none() {
            return Err(config_err("the rigidity check needs solve.sweep"));
        }
        self.grid()?;
        self.translator()?;
        Ok(())
    }

    pub fn grid(&self) -> Result<GridSpec, RunError> {
        GridSpec::new(self.domain.lo.clone(), self.domain.hi.clone(), self.shape.clone()).map_err(|e| config_err(e.to_string()))
    }

    /// Base grid halved `level` times.
    pub fn grid_at(&self, level: usize) -> Result<GridSpec, RunError> {
        let mut g = self.grid()?;
        for _ in 0..level {
            g = g.refined();
        }
        Ok(g)
    }

    pub fn translator(&self) -> Result<TranslatorSpec, RunError> {
        TranslatorSpec::new(self.translator.a.clone(), self.translator.b.clone()).map_err(|e| config_err(e.to_string()))
    }

    pub fn functions(&self) -> Result<Option<Vec<Expression>>, RunError> {
        self.functions.as_ref().map(|f| parse_functions(f, self.signature.m)).transpose()
    }

    pub fn boundary(&self) -> Result<Vec<Expression>, RunError> {
        match (&self.solve.boundary, &self.functions) {
            (Some(b), _) | (None, Some(b)) => parse_functions(b, self.signature.m),
            (None, None) => Err(config_err("solve needs solve.boundary or functions")),
        }
    }

    /// Samples from the grid file on the base grid; `grid_file` is resolved
    /// against `base_dir` when relative.
    pub fn read_grid_file(&self, base_dir: &Path) -> Result<Option<GridField>, RunError> {
        let Some(path) = &self.grid_file else {
            return Ok(None);
        };
        let path = if path.is_relative() { base_dir.join(path) } else { path.clone() };
        let file = fs::File::open(&path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        GridField::read_csv(self.grid()?, self.signature.n, BufReader::new(file))
            .map(Some)
            .map_err(|e| config_err(format!("{}: {e}", path.display())))
    }

    pub fn newton_options(&self) -> NewtonOptions {
        NewtonOptions {
            residual_tol: self.solve.residual_tol,
            max_iter: self.solve.max_iter,
            max_backtracks: self.solve.max_backtracks,
            delta_space: self.tolerances.delta_space,
            exec: self.execution,
        }
    }

    pub fn problem(&self, grid: GridSpec) -> Result<TranslatorProblem, RunError> {
        let guess = match &self.solve.initial_guess {
            GuessConfig::AffineFit => InitialGuess::AffineFit,
            GuessConfig::Expressions { functions } => {
                InitialGuess::Expressions(parse_functions(functions, self.signature.m)?)
            }
            GuessConfig::Random { seed, amplitude } => InitialGuess::Random {
                seed: *seed,
                amplitude: *amplitude,
            },
        };
        let p = TranslatorProblem::new(grid, self.translator()?, self.boundary()?).map_err(|e| config_err(e.to_string()))?;
        Ok(p.with_initial_guess(guess).with_options(self.newton_options()))
    }

    pub fn sweep_boxes(&self) -> Result<Option<Vec<GridSpec>>, RunError> {
        let Some(s) = &self.solve.sweep else {
            return Ok(None);
        };
        let boxes = match (&s.boxes, &s.radii, s.h) {
            (Some(b), _, _) => b
                .iter()
                .map(|b| GridSpec::new(b.lo.clone(), b.hi.clone(), b.shape.clone()))
                .collect::<Result<Vec<_>, _>>(),
            (None, Some(r), Some(h)) => r.iter().map(|&r| GridSpec::centered(self.signature.m, r, h)).collect(),
            _ => unreachable!("validated"),
        };
        boxes.map(Some).map_err(|e| config_err(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> serde_json::Value {
        serde_json::json!({
            "signature": {"m": 2, "n": 2},
            "functions": ["0.5*x1", "0.3*x2"],
            "translator": {"a": [1, 0], "b": [0.5, 0]},
            "domain": {"lo": [-1, -1], "hi": [1, 1]},
            "shape": [9, 9]
        })
    }

    fn parse(v: serde_json::Value) -> RunConfig {
        serde_json::from_value(v).unwrap()
    }

    #[test]
    fn defaults_fill_in() {
        let c = parse(minimal());
        c.validate().unwrap();
        assert_eq!(c.jets, Jets::Analytic);
        assert_eq!(c.solve.initial_guess, GuessConfig::AffineFit);
        assert_eq!(c.diagnose.checks.len(), 5);
        assert_eq!(c.tolerances.residual, 1e-8);
    }

    #[test]
    fn resolved_config_round_trips() {
        let c = parse(minimal());
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), c);
    }

    #[test]
    fn dimension_errors() {
        let mut v = minimal();
        v["translator"]["b"] = serde_json::json!([1]);
        assert!(parse(v).validate().is_err());
        let mut v = minimal();
        v["shape"] = serde_json::json!([9]);
        assert!(parse(v).validate().is_err());
        let mut v = minimal();
        v["functions"] = serde_json::json!(["x1"]);
        assert!(parse(v).validate().is_err());
    }

    #[test]
    fn unknown_fields_and_bad_expressions() {
        let mut v = minimal();
        v["colour"] = serde_json::json!(1);
        assert!(serde_json::from_value::<RunConfig>(v).is_err());
        let mut v = minimal();
        v["functions"] = serde_json::json!(["x3", "0"]);
        assert!(parse(v).functions().is_err());
    }

    #[test]
    fn guess_and_sweep_forms() {
        let mut v = minimal();
        v["solve"] = serde_json::json!({
            "initial_guess": {"kind": "random", "seed": 7},
            "sweep": {"radii": [1, 2], "h": 0.25}
        });
        let c = parse(v);
        c.validate().unwrap();
        assert_eq!(c.solve.initial_guess, GuessConfig::Random { seed: 7, amplitude: 0.1 });
        let boxes = c.sweep_boxes().unwrap().unwrap();
        assert_eq!(boxes[1].shape, vec![17, 17]);

        let mut v = minimal();
        v["solve"] = serde_json::json!({"sweep": {"radii": [1, 2]}});
        assert!(parse(v).validate().is_err());
    }

    #[test]
    fn rigidity_needs_a_sweep() {
        let mut v = minimal();
        v["diagnose"] = serde_json::json!({"checks": ["rigidity"]});
        assert!(parse(v).validate().is_err());
    }

    #[test]
    fn grid_files_need_fd_jets() {
        let mut v = minimal();
        v.as_object_mut().unwrap().remove("functions");
        v["grid_file"] = serde_json::json!("u.csv");
        assert!(parse(v.clone()).validate().is_err());
        v["jets"] = serde_json::json!("fd");
        parse(v).validate().unwrap();
    }
}
