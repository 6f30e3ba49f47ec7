use translator_core::analysis::{
    decay_check, gauss_image_check, gradient_estimate_check, prop31_check, prop32_check, CheckResult, Series, Surface,
};
use translator_core::richardson::self_convergence_order;
use translator_core::Error;

use crate::config::{CheckName, Source};
use crate::output::{info, level_name, Output};
use crate::verify::{diagnostic_options, input_surface};
use crate::{solve, Context, RunError, Verdict};

pub fn run(ctx: &Context) -> Result<Verdict, RunError> {
    let mut out = Output::new(ctx.out.clone(), "diagnose")?;
    let outcome = body(ctx, &mut out);
    out.complete(&ctx.config, outcome)
}

fn rejected(check: &str, h: f64, err: &Error) -> CheckResult {
    CheckResult {
        check: check.into(),
        h,
        tolerance: f64::NAN,
        worst_margin: f64::NAN,
        worst_value: f64::NAN,
        worst_location: Vec::new(),
        pass: Some(false),
        notes: vec![format!("input rejected: {err}")],
        series: Series::default(),
    }
}

fn body(ctx: &Context, out: &mut Output) -> Result<(), RunError> {
    let c = &ctx.config;
    let d = &c.diagnose;
    let t = c.translator()?;
    let opts = diagnostic_options(c);
    let boxes = c.sweep_boxes()?;
    let wants_rigidity = d.checks.contains(&CheckName::Rigidity);
    let sweep = match &boxes {
        Some(b) if wants_rigidity || d.source == Source::Solve => Some(solve::sweep(ctx, b, out)?),
        _ => None,
    };
    if sweep.is_some() && c.h_refine > 0 {
        return Err(RunError::Config("--h-refine does not apply to sweeps".into()));
    }

    let mut decay_pass = None;
    // per check, the worst margin on each level
    let mut margins: Vec<(String, Vec<f64>)> = Vec::new();
    for level in 0..=c.h_refine {
        let surface = match (d.source, &sweep) {
            (Source::Functions, _) => input_surface(ctx, c.grid_at(level)?, level)?,
            (Source::Solve, Some(s)) => match s.entries.last() {
                Some(e) => Surface::discrete(e.report.solution.clone(), Some(c.boundary()?))?,
                None => {
                    out.push(info("diagnose", f64::NAN, f64::NAN, Vec::new(), vec!["sweep produced no solution".into()]));
                    break;
                }
            },
            (Source::Solve, None) => {
                let report = solve::single(ctx, level, out)?;
                Surface::discrete(report.solution, Some(c.boundary()?))?
            }
        };
        let h = surface.grid().h();
        for &check in d.checks.iter().filter(|&&k| k != CheckName::Rigidity) {
            let outcome = match check {
                CheckName::Prop31 => prop31_check(&surface, &t, &opts).map(|r| vec![r]),
                CheckName::Prop32 => prop32_check(&surface, &t, &opts).map(|r| vec![r]),
                CheckName::Decay => decay_check(&surface, d.epsilon_probe, &opts).map(|r| vec![r]),
                CheckName::GaussImage => gauss_image_check(&surface, d.epsilon_probe, &opts),
                CheckName::GradientEstimate => gradient_estimate_check(&surface, &opts).map(|r| vec![r]),
                CheckName::Rigidity => unreachable!(),
            };
            let results = match outcome {
                Ok(r) => r,
                Err(e @ (Error::NotSpacelike { .. } | Error::DegenerateSolution(_))) => {
                    return Err(out.fail(c, check.as_str(), h, e))
                }
                Err(e @ Error::InvalidInput(_)) => vec![rejected(check.as_str(), h, &e)],
                Err(e) => return Err(e.into()),
            };
            for r in results {
                if r.check == "decay" && level == 0 {
                    decay_pass = r.pass;
                }
                if !r.series.rows.is_empty() {
                    out.series(&level_name(&r.check, "csv", level), &r.series)?;
                }
                if r.pass.is_some() {
                    match margins.iter_mut().find(|(name, _)| *name == r.check) {
                        Some((_, v)) => v.push(r.worst_margin),
                        None => margins.push((r.check.clone(), vec![r.worst_margin])),
                    }
                }
                out.push(r);
            }
        }
    }

    if c.h_refine >= 2 {
        for (name, v) in &margins {
            for (k, w) in v.windows(3).enumerate() {
                let p = self_convergence_order(w[0], w[1], w[2]);
                let h = c.grid_at(k + 2)?.h();
                out.push(info(
                    &format!("{name}_self_convergence"),
                    h,
                    p,
                    Vec::new(),
                    vec!["observed order of the worst margin from three successive grids".into()],
                ));
            }
        }
    }

    if let (true, Some(s)) = (wants_rigidity, &sweep) {
        solve::rigidity(ctx, s, decay_pass, out)?;
    }
    Ok(())
}
