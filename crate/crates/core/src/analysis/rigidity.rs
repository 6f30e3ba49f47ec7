use serde::Serialize;

use super::{CheckResult, Series};
use crate::ambient::{CausalClass, TranslatorSpec};
use crate::error::Result;
use crate::solver::{AffinePlane, SweepReport};

/// `sup ||H||` at or below this counts as a flat translator.
pub const FLAT_H_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RigidityRow {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub h: f64,
    pub converged: bool,
    pub iterations: usize,
    pub final_residual_inf: f64,
    /// Sup-norm distance to the least-squares plane over all nodes.
    pub deviation: f64,
    pub sup_h: Option<f64>,
    pub sup_b: Option<f64>,
    pub min_lambda: Option<f64>,
    pub min_det_g: Option<f64>,
    pub uniformly_spacelike: bool,
    /// Converged, uniformly spacelike and `sup ||H|| <= FLAT_H_TOL`.
    pub flat_translator: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RigidityReport {
    pub causal_class: CausalClass,
    pub rows: Vec<RigidityRow>,
    pub stopped: Option<(usize, String)>,
    pub result: CheckResult,
}

/// Affine-plane deviation and curvature bounds per box of a continuation
/// sweep, alongside the causal class of `T` and an optional decay verdict.
pub fn rigidity_sweep(
    sweep: &SweepReport,
    t: &TranslatorSpec,
    spacelike_threshold: f64,
    decay_pass: Option<bool>,
) -> Result<RigidityReport> {
    let mut rows = Vec::with_capacity(sweep.entries.len());
    let m = t.a.len();
    let mut series = Series::new(m);
    for e in &sweep.entries {
        let field = &e.report.solution;
        let plane = AffinePlane::fit_all(field)?;
        let nodes: Vec<usize> = (0..field.spec().len()).collect();
        let deviation = plane.deviation(field, &nodes);
        let s = e.summary;
        let uniformly_spacelike = s.is_some_and(|s| s.min_lambda > spacelike_threshold);
        let flat_translator =
            e.report.converged && uniformly_spacelike && s.is_some_and(|s| s.sup_h <= FLAT_H_TOL);
        let hi = e.grid.hi.clone();
        series.push(&hi, "deviation", deviation);
        series.push(&hi, "converged", f64::from(u8::from(e.report.converged)));
        series.push(&hi, "flat_translator", f64::from(u8::from(flat_translator)));
        if let Some(s) = s {
            series.push(&hi, "sup_h", s.sup_h);
            series.push(&hi, "sup_b", s.sup_b);
            series.push(&hi, "min_lambda", s.min_lambda);
            series.push(&hi, "min_det_g", s.min_det_g);
        }
        rows.push(RigidityRow {
            lo: e.grid.lo.clone(),
            hi,
            h: e.grid.h(),
            converged: e.report.converged,
            iterations: e.report.iterations,
            final_residual_inf: e.report.final_residual_inf,
            deviation,
            sup_h: s.map(|s| s.sup_h),
            sup_b: s.map(|s| s.sup_b),
            min_lambda: s.map(|s| s.min_lambda),
            min_det_g: s.map(|s| s.min_det_g),
            uniformly_spacelike,
            flat_translator,
        });
    }
    let worst = rows
        .iter()
        .fold(None, |acc: Option<&RigidityRow>, r| match acc {
            Some(a) if a.deviation >= r.deviation => Some(a),
            _ => Some(r),
        });
    let mut notes = vec![format!("translating vector is {}", t.causal_class)];
    if let Some((k, why)) = &sweep.stopped {
        notes.push(format!("sweep stopped at box {}: {why}", k + 1));
    }
    if let Some(d) = decay_pass {
        notes.push(format!("decay probe {}", if d { "passes" } else { "fails" }));
    }
    let flat_boxes = rows.iter().filter(|r| r.flat_translator).count();
    notes.push(format!("{flat_boxes} of {} boxes give a flat spacelike translator", rows.len()));
    let result = CheckResult {
        check: "rigidity_sweep".into(),
        h: rows.last().map_or(f64::NAN, |r| r.h),
        tolerance: f64::NAN,
        worst_margin: worst.map_or(f64::NAN, |r| r.deviation),
        worst_value: worst.map_or(f64::NAN, |r| r.deviation),
        worst_location: worst.map_or_else(Vec::new, |r| r.hi.clone()),
        pass: None,
        notes,
        series,
    };
    Ok(RigidityReport {
        causal_class: t.causal_class,
        rows,
        stopped: sweep.stopped.clone(),
        result,
    })
}
