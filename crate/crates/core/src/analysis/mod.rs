//! Diagnostics over analytic fixtures and sampled or solved fields.
//!
//! Each check returns a [`CheckResult`]: worst value and margin, where it
//! occurs, the tolerance and grid spacing it was judged at, and a long-form
//! [`Series`] of the sampled quantities for CSV export.

mod pointwise;
mod propositions;
mod probes;
mod rigidity;

pub use pointwise::{pointwise, PointRecord};
pub use propositions::{prop31_check, prop32_check};
pub use probes::{decay_check, gauss_image_check, gradient_estimate_check};
pub use rigidity::{rigidity_sweep, RigidityReport, RigidityRow, FLAT_H_TOL};

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::expr::{analytic_jet, Expression};
use crate::geometry::DEFAULT_DELTA_SPACE;
use crate::grid::{format_f64, GridField, GridSpec};
use crate::jet::Jet2;

/// A graph to diagnose: closed-form functions sampled on a grid, or a grid
/// field whose jets come from central differences.
#[derive(Debug, Clone, PartialEq)]
pub enum Surface {
    Analytic { exprs: Vec<Expression>, grid: GridSpec },
    /// `boundary`, when present, supplies exact jets on the faces of the box
    /// (the Dirichlet data of a solve).
    Discrete { field: GridField, boundary: Option<Vec<Expression>> },
}

impl Surface {
    pub fn analytic(exprs: Vec<Expression>, grid: GridSpec) -> Result<Self> {
        check_exprs(&exprs, grid.dim())?;
        Ok(Surface::Analytic { exprs, grid })
    }

    pub fn discrete(field: GridField, boundary: Option<Vec<Expression>>) -> Result<Self> {
        if let Some(b) = &boundary {
            check_exprs(b, field.spec().dim())?;
            if b.len() != field.n() {
                return Err(Error::DimensionMismatch {
                    what: "boundary functions",
                    expected: field.n(),
                    got: b.len(),
                });
            }
        }
        Ok(Surface::Discrete { field, boundary })
    }

    pub fn grid(&self) -> &GridSpec {
        match self {
            Surface::Analytic { grid, .. } => grid,
            Surface::Discrete { field, .. } => field.spec(),
        }
    }

    pub fn m(&self) -> usize {
        self.grid().dim()
    }

    pub fn n(&self) -> usize {
        match self {
            Surface::Analytic { exprs, .. } => exprs.len(),
            Surface::Discrete { field, .. } => field.n(),
        }
    }

    pub fn is_analytic(&self) -> bool {
        matches!(self, Surface::Analytic { .. })
    }

    /// Jet at a node, or `None` where a discrete field has no jet (faces of
    /// the box without boundary functions).
    pub fn jet(&self, flat: usize) -> Result<Option<Jet2>> {
        let spec = self.grid();
        let idx = spec.multi(flat);
        match self {
            Surface::Analytic { exprs, .. } => analytic_jet(exprs, &spec.coord(&idx)).map(Some),
            Surface::Discrete { field, boundary } => {
                if spec.boundary_distance(&idx) >= 1 {
                    field.fd_jet(&idx).map(Some)
                } else if let Some(b) = boundary {
                    analytic_jet(b, &spec.coord(&idx)).map(Some)
                } else {
                    Ok(None)
                }
            }
        }
    }

    /// Nodes where [`jet`](Self::jet) returns a value.
    pub fn evaluable_nodes(&self) -> Vec<usize> {
        match self {
            Surface::Discrete { boundary: None, field } => field.spec().nodes_with_margin(1),
            _ => (0..self.grid().len()).collect(),
        }
    }
}

fn check_exprs(exprs: &[Expression], m: usize) -> Result<()> {
    if exprs.is_empty() {
        return Err(Error::InvalidInput("need at least one graph function".into()));
    }
    if let Some(e) = exprs.iter().find(|e| e.num_vars() != m) {
        return Err(Error::DimensionMismatch {
            what: "expression variables",
            expected: m,
            got: e.num_vars(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticOptions {
    pub exec: Execution,
    pub delta_space: f64,
    /// Pass threshold for differential inequalities evaluated with exact jets.
    pub analytic_tol: f64,
    /// Largest translator residual accepted as input to the proposition checks.
    pub translator_tol: f64,
    /// Differential-inequality checks on discrete fields skip nodes this many
    /// cells from the boundary or closer.
    pub boundary_exclusion: usize,
    /// Inner radius for decay probes; half the box radius when `None`.
    pub r0: Option<f64>,
}

impl Default for DiagnosticOptions {
    fn default() -> Self {
        DiagnosticOptions {
            exec: Execution::default(),
            delta_space: DEFAULT_DELTA_SPACE,
            analytic_tol: 1e-10,
            translator_tol: 1e-8,
            boundary_exclusion: 3,
            r0: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesRow {
    pub x: Vec<f64>,
    pub quantity: String,
    pub value: f64,
}

/// Long-form samples: one row per point and quantity.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Series {
    pub m: usize,
    pub rows: Vec<SeriesRow>,
}

impl Series {
    pub fn new(m: usize) -> Self {
        Series { m, rows: Vec::new() }
    }

    pub fn push(&mut self, x: &[f64], quantity: &str, value: f64) {
        self.rows.push(SeriesRow {
            x: x.to_vec(),
            quantity: quantity.to_string(),
            value,
        });
    }

    /// Values of one quantity in row order.
    pub fn values(&self, quantity: &str) -> Vec<(Vec<f64>, f64)> {
        self.rows
            .iter()
            .filter(|r| r.quantity == quantity)
            .map(|r| (r.x.clone(), r.value))
            .collect()
    }

    /// Columns `x1..xm,quantity,value`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let mut header: Vec<String> = (1..=self.m).map(|i| format!("x{i}")).collect();
        header.push("quantity".into());
        header.push("value".into());
        writeln!(w, "{}", header.join(","))?;
        for r in &self.rows {
            let mut fields: Vec<String> = r.x.iter().map(|v| format_f64(*v)).collect();
            fields.push(r.quantity.clone());
            fields.push(format_f64(r.value));
            writeln!(w, "{}", fields.join(","))?;
        }
        Ok(())
    }
}

/// Outcome of one diagnostic. `pass` is `None` for informational checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub h: f64,
    pub tolerance: f64,
    /// `prop31` and `prop32`: smallest `LHS - RHS`, passing when `>= -tolerance`.
    /// Threshold probes: smallest sampled value minus the threshold.
    pub worst_margin: f64,
    /// The sampled quantity at the worst location.
    pub worst_value: f64,
    pub worst_location: Vec<f64>,
    pub pass: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip)]
    pub series: Series,
}

fn radius(spec: &GridSpec) -> f64 {
    (0..spec.dim())
        .map(|i| 0.5 * (spec.hi[i] - spec.lo[i]))
        .fold(f64::INFINITY, f64::min)
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests;
