use translator_core::analysis::{rigidity_sweep, CheckResult, RigidityReport, Series};
use translator_core::solver::{continuation_sweep, newton_solve, SolveReport, SweepReport, DIRICHLET_NOTE};
use translator_core::{Error, GridSpec};

use crate::output::{info, level_name, order_results, Output};
use crate::{Context, RunError, Verdict};

fn newton_result(report: &SolveReport, h: f64, tol: f64) -> CheckResult {
    let mut notes = vec![
        format!("converged = {}", report.converged),
        format!("iterations = {}", report.iterations),
        format!("spacelike_min_eig = {:e}", report.spacelike_min_eig),
    ];
    if !report.note.is_empty() {
        notes.push(report.note.clone());
    }
    notes.push(DIRICHLET_NOTE.into());
    CheckResult {
        check: "newton_solve".into(),
        h,
        tolerance: tol,
        worst_margin: tol - report.final_residual_inf,
        worst_value: report.final_residual_inf,
        worst_location: Vec::new(),
        pass: Some(report.converged),
        notes,
        series: Series::default(),
    }
}

fn write_history(out: &mut Output, name: &str, report: &SolveReport) -> Result<(), RunError> {
    use translator_core::grid::format_f64;
    out.file(name, |w| {
        use std::io::Write;
        writeln!(w, "iteration,residual_inf,step_length")?;
        for (k, r) in report.residual_history.iter().enumerate() {
            let step = if k == 0 { String::new() } else { format_f64(report.step_lengths[k - 1]) };
            writeln!(w, "{k},{},{step}", format_f64(*r))?;
        }
        Ok(())
    })
}

/// Sup-norm distance between the solution and the configured `functions`
/// over all nodes, with its location.
fn error_vs_functions(ctx: &Context, report: &SolveReport) -> Result<Option<(f64, Vec<f64>)>, RunError> {
    let Some(exprs) = ctx.config.functions()? else {
        return Ok(None);
    };
    let field = &report.solution;
    let spec = field.spec();
    let mut worst = (0.0_f64, Vec::new());
    for k in 0..spec.len() {
        let x = spec.coord(&spec.multi(k));
        for (a, e) in exprs.iter().enumerate() {
            let d = (field.at(a, k) - e.eval(&x)?).abs();
            if d > worst.0 {
                worst = (d, x.clone());
            }
        }
    }
    Ok(Some(worst))
}

/// One Newton solve on the base grid halved `level` times, with its result,
/// solution and residual history recorded.
pub fn single(ctx: &Context, level: usize, out: &mut Output) -> Result<SolveReport, RunError> {
    let c = &ctx.config;
    let grid = c.grid_at(level)?;
    let h = grid.h();
    let report = match newton_solve(&c.problem(grid)?) {
        Ok(r) => r,
        Err(e @ (Error::NotSpacelike { .. } | Error::DegenerateSolution(_) | Error::LinearSolve(_))) => {
            return Err(out.fail(c, "newton_solve", h, e))
        }
        Err(e) => return Err(e.into()),
    };
    out.push(newton_result(&report, h, c.solve.residual_tol));
    let solution = &report.solution;
    out.file(&level_name("solution", "csv", level), |w| solution.write_csv(w))?;
    write_history(out, &level_name("residual_history", "csv", level), &report)?;
    Ok(report)
}

fn box_result(k: usize, entry: &translator_core::solver::SweepEntry) -> CheckResult {
    let r = &entry.report;
    let mut notes = vec![
        format!("box {}: [{:?}, {:?}]", k + 1, entry.grid.lo, entry.grid.hi),
        format!("converged = {}", r.converged),
        format!("iterations = {}", r.iterations),
    ];
    if let Some(s) = entry.summary {
        notes.push(format!(
            "sup ||H|| = {:e}, sup ||B|| = {:e}, min lambda_min = {:e}, min det g = {:e}",
            s.sup_h, s.sup_b, s.min_lambda, s.min_det_g
        ));
    }
    if !r.note.is_empty() {
        notes.push(r.note.clone());
    }
    info("sweep_box", entry.grid.h(), r.final_residual_inf, entry.grid.hi.clone(), notes)
}

/// Continuation sweep over `boxes` with per-box results and solutions.
pub fn sweep(ctx: &Context, boxes: &[GridSpec], out: &mut Output) -> Result<SweepReport, RunError> {
    let p = ctx.config.problem(boxes[0].clone())?;
    let report = continuation_sweep(&p, boxes)?;
    for (k, e) in report.entries.iter().enumerate() {
        out.push(box_result(k, e));
        let solution = &e.report.solution;
        out.file(&format!("solution_box{}.csv", k + 1), |w| solution.write_csv(w))?;
    }
    Ok(report)
}

/// Affine-deviation summary of a sweep, informed by a decay verdict when one
/// is available.
pub fn rigidity(
    ctx: &Context,
    report: &SweepReport,
    decay_pass: Option<bool>,
    out: &mut Output,
) -> Result<RigidityReport, RunError> {
    let c = &ctx.config;
    let rigidity = rigidity_sweep(report, &c.translator()?, c.newton_options().spacelike_threshold(), decay_pass)?;
    let mut result = rigidity.result.clone();
    result.notes.push(DIRICHLET_NOTE.into());
    out.series("rigidity.csv", &rigidity.result.series)?;
    out.push(result);
    Ok(rigidity)
}

pub fn run(ctx: &Context) -> Result<Verdict, RunError> {
    let mut out = Output::new(ctx.out.clone(), "solve")?;
    let outcome = body(ctx, &mut out);
    out.complete(&ctx.config, outcome)
}

fn body(ctx: &Context, out: &mut Output) -> Result<(), RunError> {
    let c = &ctx.config;
    if let Some(boxes) = c.sweep_boxes()? {
        if c.h_refine > 0 {
            return Err(RunError::Config("--h-refine does not apply to sweeps".into()));
        }
        let report = sweep(ctx, &boxes, out)?;
        rigidity(ctx, &report, None, out)?;
        return Ok(());
    }
    let mut errors = Vec::new();
    for level in 0..=c.h_refine {
        let report = single(ctx, level, out)?;
        let h = report.solution.spec().h();
        if let Some((err, at)) = error_vs_functions(ctx, &report)? {
            out.push(info(
                "error_vs_functions",
                h,
                err,
                at,
                vec!["sup-norm distance to the configured functions over all nodes".into()],
            ));
            errors.push((h, err));
        }
    }
    if c.h_refine > 0 {
        for r in order_results("error_order", &errors) {
            out.push(r);
        }
    }
    Ok(())
}
