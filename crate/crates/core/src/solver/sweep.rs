use super::assembly::Interior;
use super::newton::newton_solve;
use super::{InitialGuess, SolveReport, TranslatorProblem};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::PointGeometry;
use crate::grid::{GridField, GridSpec};

/// Extremes of pointwise geometry over the interior nodes of a field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceSummary {
    pub sup_h: f64,
    pub sup_b: f64,
    pub min_lambda: f64,
    pub min_det_g: f64,
    /// Smallest `||B||^2 - ||H||^2 / m`.
    pub min_schwarz_margin: f64,
}

/// Evaluate the geometry from central-difference jets at every interior node.
pub fn summarize(field: &GridField, delta_space: f64, exec: Execution) -> Result<SurfaceSummary> {
    let spec = field.spec();
    let nodes = spec.nodes_with_margin(1);
    let per_node = exec.try_map(nodes.len(), |q| -> Result<[f64; 5]> {
        let jet = field.fd_jet(&spec.multi(nodes[q]))?;
        let geom = PointGeometry::new(&jet, delta_space)?;
        let ex = &geom.extrinsic;
        Ok([
            ex.h_norm2.max(0.0).sqrt(),
            ex.b_norm2.max(0.0).sqrt(),
            geom.metric.lambda_min,
            geom.metric.det_g,
            ex.schwarz_margin(),
        ])
    })?;
    let mut s = SurfaceSummary {
        sup_h: 0.0,
        sup_b: 0.0,
        min_lambda: f64::INFINITY,
        min_det_g: f64::INFINITY,
        min_schwarz_margin: f64::INFINITY,
    };
    for v in per_node {
        s.sup_h = s.sup_h.max(v[0]);
        s.sup_b = s.sup_b.max(v[1]);
        s.min_lambda = s.min_lambda.min(v[2]);
        s.min_det_g = s.min_det_g.min(v[3]);
        s.min_schwarz_margin = s.min_schwarz_margin.min(v[4]);
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub grid: GridSpec,
    pub report: SolveReport,
    /// `None` when the final iterate is not spacelike enough to evaluate.
    pub summary: Option<SurfaceSummary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub entries: Vec<SweepEntry>,
    /// Box index and reason when the sweep ended before the last box.
    pub stopped: Option<(usize, String)>,
}

impl SweepReport {
    pub fn completed(&self) -> bool {
        self.stopped.is_none()
    }
}

fn contains(outer: &GridSpec, inner: &GridSpec) -> bool {
    outer.dim() == inner.dim() && (0..outer.dim()).all(|i| outer.lo[i] <= inner.lo[i] && outer.hi[i] >= inner.hi[i])
}

fn inside(spec: &GridSpec, x: &[f64]) -> bool {
    x.iter().enumerate().all(|(i, &c)| c >= spec.lo[i] && c <= spec.hi[i])
}

/// Seed for the next box: the previous solution where it is defined and the
/// Dirichlet functions elsewhere. The previous solution carries those same
/// functions on its faces, so the seed is continuous.
fn extend(p: &TranslatorProblem, previous: &GridField) -> Result<GridField> {
    let outer = super::newton::initial_state(p)?;
    let spec = &p.grid;
    let interior = Interior::new(spec);
    let mut samples = outer.samples().to_vec();
    for &k in &interior.nodes {
        let x = spec.coord(&spec.multi(k));
        if inside(previous.spec(), &x) {
            for (a, v) in previous.interpolate(&x).into_iter().enumerate() {
                samples[a][k] = v;
            }
        }
    }
    GridField::new(spec.clone(), samples)
}

/// Solve on each of the nested boxes in turn, seeding each solve with the
/// previous solution. The first box uses the problem's own initial guess.
/// Stops at the first solve that errors or fails to converge.
pub fn continuation_sweep(p: &TranslatorProblem, boxes: &[GridSpec]) -> Result<SweepReport> {
    for w in boxes.windows(2) {
        if !contains(&w[1], &w[0]) {
            return Err(Error::InvalidInput("continuation boxes must be nested and growing".into()));
        }
    }
    let mut entries: Vec<SweepEntry> = Vec::new();
    for (k, grid) in boxes.iter().enumerate() {
        let mut problem = p.on_grid(grid.clone());
        if let Some(prev) = entries.last() {
            problem.initial_guess = InitialGuess::Expressions(problem.boundary.clone());
            let seed = extend(&problem, &prev.report.solution)?;
            problem.initial_guess = InitialGuess::Field(seed);
        }
        problem.validate()?;
        let report = match newton_solve(&problem) {
            Ok(r) => r,
            Err(e @ (Error::InvalidInput(_) | Error::DimensionMismatch { .. })) => return Err(e),
            Err(e) => {
                return Ok(SweepReport {
                    entries,
                    stopped: Some((k, e.to_string())),
                })
            }
        };
        let summary = summarize(&report.solution, p.options.delta_space, p.options.exec).ok();
        let converged = report.converged;
        entries.push(SweepEntry {
            grid: grid.clone(),
            report,
            summary,
        });
        if !converged {
            return Ok(SweepReport {
                entries,
                stopped: Some((k, "Newton did not converge".into())),
            });
        }
    }
    Ok(SweepReport { entries, stopped: None })
}
