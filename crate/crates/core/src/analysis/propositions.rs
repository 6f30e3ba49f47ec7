//! Pointwise differential inequalities for `||H||^2` and `||B||^2` on
//! translators:
//!
//! `Delta ||H||^2 >= (2/m) ||H||^4 - <T, grad ||H||^2>`,
//! `Delta ||B||^2 >= (2/n) ||B||^4 - <T, grad ||B||^2>`,
//!
//! with `<T, grad f> = V^i f_,i` and `V` the tangential part of `T`.

use super::{CheckResult, DiagnosticOptions, Series, Surface};
use crate::ambient::TranslatorSpec;
use crate::error::{Error, Result};
use crate::expr::analytic_jet_lifted;
use crate::geometry::{laplace_beltrami, norm_squares, PointGeometry};
use crate::grid::{GridField, GridSpec};
use crate::jet::{Jet2, ScalarJet};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Norm {
    H,
    B,
}

impl Norm {
    fn name(self) -> &'static str {
        match self {
            Norm::H => "prop31",
            Norm::B => "prop32",
        }
    }

    fn pick(self, h: f64, b: f64) -> f64 {
        match self {
            Norm::H => h,
            Norm::B => b,
        }
    }
}

struct NodeMargin {
    x: Vec<f64>,
    lhs: f64,
    rhs: f64,
    /// `lhs - rhs`.
    margin: f64,
    /// Margin with the opposite sign on the transport term.
    alternate: f64,
}

fn margin_at(geom: &PointGeometry, f: &ScalarJet, t: &TranslatorSpec, k: usize) -> NodeMargin {
    let lhs = laplace_beltrami(f, &geom.metric);
    let v = geom.tangential_components(&t.to_ambient());
    let transport: f64 = v.iter().zip(&f.grad).map(|(a, b)| a * b).sum();
    let quartic = 2.0 / k as f64 * f.value * f.value;
    NodeMargin {
        x: geom.jet.base().to_vec(),
        lhs,
        rhs: quartic - transport,
        margin: lhs - quartic + transport,
        alternate: lhs - quartic - transport,
    }
}

fn require_translator(geom: &PointGeometry, t: &TranslatorSpec, tol: f64) -> Result<()> {
    let r = geom.translator_residual(t)?;
    let worst = r.iter().fold(0.0_f64, |a, c| a.max(c.abs()));
    if worst > tol {
        return Err(Error::InvalidInput(format!(
            "input is not a translator: residual {worst:e} exceeds {tol:e} at {:?}",
            geom.jet.base()
        )));
    }
    Ok(())
}

fn analytic_margins(
    exprs: &[crate::expr::Expression],
    grid: &GridSpec,
    t: &TranslatorSpec,
    which: Norm,
    opts: &DiagnosticOptions,
) -> Result<Vec<NodeMargin>> {
    let k = match which {
        Norm::H => grid.dim(),
        Norm::B => exprs.len(),
    };
    opts.exec.try_map(grid.len(), |q| {
        let x = grid.coord(&grid.multi(q));
        let lifted = analytic_jet_lifted(exprs, &x)?;
        let (h2, b2) = norm_squares(&lifted);
        let f = ScalarJet::from_dual(if which == Norm::H { &h2 } else { &b2 }, grid.dim());
        let geom = PointGeometry::new(&Jet2::from_values(&lifted), opts.delta_space)?;
        require_translator(&geom, t, opts.translator_tol)?;
        Ok(margin_at(&geom, &f, t, k))
    })
}

/// Margins on a sampled field: the norm-square field from central-difference
/// jets, then differentiated again by central differences.
fn discrete_margins(
    field: &GridField,
    t: &TranslatorSpec,
    which: Norm,
    opts: &DiagnosticOptions,
    check_translator: bool,
) -> Result<Vec<NodeMargin>> {
    let spec = field.spec();
    let k = match which {
        Norm::H => spec.dim(),
        Norm::B => field.n(),
    };
    let inner = spec.nodes_with_margin(1);
    let values = opts.exec.try_map(inner.len(), |q| -> Result<f64> {
        let geom = PointGeometry::new(&field.fd_jet(&spec.multi(inner[q]))?, opts.delta_space)?;
        if check_translator {
            require_translator(&geom, t, opts.translator_tol)?;
        }
        Ok(which.pick(geom.extrinsic.h_norm2, geom.extrinsic.b_norm2))
    })?;
    let mut samples = vec![0.0; spec.len()];
    for (q, v) in values.into_iter().enumerate() {
        samples[inner[q]] = v;
    }
    let scalar = GridField::new(spec.clone(), vec![samples])?;
    let nodes = spec.nodes_with_margin(opts.boundary_exclusion.max(2));
    opts.exec.try_map(nodes.len(), |q| {
        let idx = spec.multi(nodes[q]);
        let geom = PointGeometry::new(&field.fd_jet(&idx)?, opts.delta_space)?;
        let fj = scalar.fd_jet(&idx)?;
        let f = ScalarJet {
            value: *fj.u(0),
            grad: (0..spec.dim()).map(|i| *fj.du(0, i)).collect(),
            hess: (0..spec.dim() * spec.dim())
                .map(|c| *fj.d2u(0, c / spec.dim(), c % spec.dim()))
                .collect(),
        };
        Ok(margin_at(&geom, &f, t, k))
    })
}

fn same_point(a: &[f64], b: &[f64], h: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-9 * h)
}

fn run(surface: &Surface, t: &TranslatorSpec, which: Norm, opts: &DiagnosticOptions) -> Result<CheckResult> {
    let h = surface.grid().h();
    let mut notes = Vec::new();
    let (margins, tolerance) = match surface {
        Surface::Analytic { exprs, grid } => (analytic_margins(exprs, grid, t, which, opts)?, opts.analytic_tol),
        Surface::Discrete { field, .. } => {
            let fine = discrete_margins(field, t, which, opts, true)?;
            let kappa = match field.coarsened() {
                Some(coarse) => {
                    let coarse_margins = discrete_margins(&coarse, t, which, opts, false)?;
                    let mut diff: f64 = 0.0;
                    let mut j = 0;
                    for c in &coarse_margins {
                        while j < fine.len() && !same_point(&fine[j].x, &c.x, h) {
                            j += 1;
                        }
                        if j < fine.len() {
                            diff = diff.max((fine[j].margin - c.margin).abs());
                        }
                    }
                    crate::richardson::leading_coefficient(diff, h, 2.0)
                }
                None => {
                    notes.push("grid cannot be coarsened (even node count); discretization budget not calibrated".into());
                    0.0
                }
            };
            notes.push(format!("tol_disc(h) = kappa h^2 with kappa = {kappa:e}"));
            (fine, kappa * h * h)
        }
    };
    if margins.is_empty() {
        return Err(Error::InvalidInput("no nodes far enough from the boundary to evaluate".into()));
    }
    let m = surface.m();
    let mut series = Series::new(m);
    let mut worst = 0;
    let mut worst_alt = f64::INFINITY;
    for (q, nm) in margins.iter().enumerate() {
        series.push(&nm.x, "lhs", nm.lhs);
        series.push(&nm.x, "rhs", nm.rhs);
        series.push(&nm.x, "margin", nm.margin);
        if nm.margin < margins[worst].margin {
            worst = q;
        }
        worst_alt = worst_alt.min(nm.alternate);
    }
    let w = &margins[worst];
    let pass = w.margin >= -tolerance;
    if !pass {
        notes.push(format!(
            "worst margin with the transport term sign flipped: {worst_alt:e} ({})",
            if worst_alt >= -tolerance { "would pass" } else { "also fails" }
        ));
    }
    Ok(CheckResult {
        check: which.name().into(),
        h,
        tolerance,
        worst_margin: w.margin,
        worst_value: w.margin,
        worst_location: w.x.clone(),
        pass: Some(pass),
        notes,
        series,
    })
}

/// Mean-curvature inequality at every qualifying node.
pub fn prop31_check(surface: &Surface, t: &TranslatorSpec, opts: &DiagnosticOptions) -> Result<CheckResult> {
    run(surface, t, Norm::H, opts)
}

/// Second-fundamental-form inequality at every qualifying node.
pub fn prop32_check(surface: &Surface, t: &TranslatorSpec, opts: &DiagnosticOptions) -> Result<CheckResult> {
    run(surface, t, Norm::B, opts)
}
