//! Damped Newton solution of the translator system on a box with Dirichlet
//! data, and continuation over growing boxes.
//!
//! The object of interest is an entire graph; here the graph is truncated to
//! a box and its values on the faces are prescribed. Every [`SolveReport`]
//! carries [`DIRICHLET_NOTE`] to say so.

mod assembly;
mod fit;
mod newton;
mod sweep;

pub use assembly::{assemble_jacobian, assemble_residual, harmonic_lift, Interior, Jacobian, Residual};
pub use fit::AffinePlane;
pub use newton::{initial_state, newton_solve};
pub use sweep::{continuation_sweep, summarize, SurfaceSummary, SweepEntry, SweepReport};

use crate::ambient::{SpaceSignature, TranslatorSpec};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::expr::Expression;
use crate::geometry::DEFAULT_DELTA_SPACE;
use crate::grid::{GridField, GridSpec};

/// Minimum nodes per axis for a solve.
pub const MIN_SOLVER_NODES: usize = 9;

pub const DIRICHLET_NOTE: &str =
    "Dirichlet truncation: the graph is solved on a bounded box with prescribed face values, not as an entire solution";

#[derive(Debug, Clone, PartialEq)]
pub enum InitialGuess {
    /// Least-squares affine fit to the boundary values.
    AffineFit,
    Expressions(Vec<Expression>),
    Field(GridField),
    /// Affine fit plus uniform noise in `[-amplitude, amplitude]`.
    Random { seed: u64, amplitude: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub residual_tol: f64,
    pub max_iter: usize,
    /// Halvings of the step before giving up on a Newton direction.
    pub max_backtracks: usize,
    /// Iterates need `lambda_min(g) > 10 * delta_space` at every interior node.
    pub delta_space: f64,
    pub exec: Execution,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            residual_tol: 1e-8,
            max_iter: 50,
            max_backtracks: 30,
            delta_space: DEFAULT_DELTA_SPACE,
            exec: Execution::default(),
        }
    }
}

impl NewtonOptions {
    pub fn spacelike_threshold(&self) -> f64 {
        10.0 * self.delta_space
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TranslatorProblem {
    pub sig: SpaceSignature,
    pub grid: GridSpec,
    pub translator: TranslatorSpec,
    pub boundary: Vec<Expression>,
    pub initial_guess: InitialGuess,
    pub options: NewtonOptions,
}

impl TranslatorProblem {
    pub fn new(grid: GridSpec, translator: TranslatorSpec, boundary: Vec<Expression>) -> Result<Self> {
        let p = TranslatorProblem {
            sig: translator.signature(),
            grid,
            translator,
            boundary,
            initial_guess: InitialGuess::AffineFit,
            options: NewtonOptions::default(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_initial_guess(mut self, guess: InitialGuess) -> Self {
        self.initial_guess = guess;
        self
    }

    pub fn with_options(mut self, options: NewtonOptions) -> Self {
        self.options = options;
        self
    }

    /// Same problem on another box.
    pub fn on_grid(&self, grid: GridSpec) -> Self {
        TranslatorProblem {
            grid,
            ..self.clone()
        }
    }

    /// Structural checks: dimensions and grid size.
    pub fn validate(&self) -> Result<()> {
        let (m, n) = (self.sig.m, self.sig.n);
        if self.translator.signature() != self.sig {
            return Err(Error::InvalidInput("translating vector does not match the signature".into()));
        }
        if self.grid.dim() != m {
            return Err(Error::DimensionMismatch {
                what: "grid dimension",
                expected: m,
                got: self.grid.dim(),
            });
        }
        if let Some(axis) = self.grid.shape.iter().position(|&s| s < MIN_SOLVER_NODES) {
            return Err(Error::InvalidInput(format!(
                "solver grids need at least {MIN_SOLVER_NODES} nodes per axis, axis {} has {}",
                axis + 1,
                self.grid.shape[axis]
            )));
        }
        if self.boundary.len() != n {
            return Err(Error::DimensionMismatch {
                what: "boundary functions",
                expected: n,
                got: self.boundary.len(),
            });
        }
        let exprs = match &self.initial_guess {
            InitialGuess::Expressions(e) => {
                if e.len() != n {
                    return Err(Error::DimensionMismatch {
                        what: "initial-guess functions",
                        expected: n,
                        got: e.len(),
                    });
                }
                e.as_slice()
            }
            InitialGuess::Field(f) => {
                if f.spec() != &self.grid || f.n() != n {
                    return Err(Error::InvalidInput("initial-guess field does not match the problem grid".into()));
                }
                &[]
            }
            InitialGuess::Random { amplitude, .. } => {
                if !(amplitude.is_finite() && *amplitude >= 0.0) {
                    return Err(Error::InvalidInput("random amplitude must be finite and non-negative".into()));
                }
                &[]
            }
            InitialGuess::AffineFit => &[],
        };
        for e in self.boundary.iter().chain(exprs) {
            if e.num_vars() != m {
                return Err(Error::DimensionMismatch {
                    what: "expression variables",
                    expected: m,
                    got: e.num_vars(),
                });
            }
        }
        let o = &self.options;
        if !(o.residual_tol > 0.0 && o.delta_space > 0.0 && o.max_iter > 0) {
            return Err(Error::InvalidInput("tolerances and iteration limit must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub converged: bool,
    pub iterations: usize,
    /// Residual sup-norm before the first step and after each accepted step.
    pub residual_history: Vec<f64>,
    /// Accepted step lengths, one per iteration.
    pub step_lengths: Vec<f64>,
    pub final_residual_inf: f64,
    pub spacelike_min_eig: f64,
    pub solution: GridField,
    pub note: String,
}
