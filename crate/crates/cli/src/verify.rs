use translator_core::analysis::{pointwise, CheckResult, DiagnosticOptions, PointRecord, Series, Surface};
use translator_core::geometry::{laplace_beltrami, pseudo_distance_at, pseudo_distance_coordinate_jet, PointGeometry};
use translator_core::grid::format_f64;
use translator_core::{Error, GridField, GridSpec, TranslatorSpec};

use crate::config::{Jets, RunConfig};
use crate::output::{info, level_name, order_results, Output};
use crate::{Context, RunError, Verdict};

const SCHWARZ_TOL: f64 = 1e-12;
const IDENTITY_TOL: f64 = 1e-10;

/// Surface described by `functions` or `grid_file` on the given grid.
pub fn input_surface(ctx: &Context, grid: GridSpec, level: usize) -> Result<Surface, RunError> {
    let c = &ctx.config;
    if let Some(field) = c.read_grid_file(&ctx.base_dir)? {
        if level > 0 {
            return Err(RunError::Config("grid-file input cannot be refined; drop --h-refine".into()));
        }
        return Ok(Surface::discrete(field, None)?);
    }
    let exprs = c.functions()?.expect("validated: functions or grid_file");
    Ok(match c.jets {
        Jets::Analytic => Surface::analytic(exprs, grid)?,
        Jets::Fd => Surface::discrete(GridField::from_expressions(grid, &exprs, c.execution)?, None)?,
    })
}

pub fn diagnostic_options(c: &RunConfig) -> DiagnosticOptions {
    DiagnosticOptions {
        exec: c.execution,
        delta_space: c.tolerances.delta_space,
        analytic_tol: c.tolerances.analytic,
        translator_tol: c.tolerances.translator,
        boundary_exclusion: c.diagnose.boundary_exclusion,
        r0: c.diagnose.r0,
    }
}

/// `z` and the gap between `2m + 2<X,H>` and the Laplace-Beltrami operator
/// applied to `z` in coordinates, in the order of `surface.evaluable_nodes()`.
fn pseudo_distance_rows(surface: &Surface, opts: &DiagnosticOptions) -> Result<Vec<(f64, f64, f64)>, Error> {
    let nodes = surface.evaluable_nodes();
    opts.exec.try_map(nodes.len(), |q| {
        let jet = surface.jet(nodes[q])?.expect("evaluable node");
        let geom = PointGeometry::new(&jet, opts.delta_space)?;
        let pd = pseudo_distance_at(&geom);
        let lb = laplace_beltrami(&pseudo_distance_coordinate_jet(&jet), &geom.metric);
        Ok((pd.z, pd.lap_z, (pd.lap_z - lb).abs() / (1.0 + lb.abs())))
    })
}

fn write_fields(
    out: &mut Output,
    name: &str,
    m: usize,
    n: usize,
    records: &[PointRecord],
    pd: &[(f64, f64, f64)],
) -> Result<(), RunError> {
    out.file(name, |w| {
        use std::io::Write;
        let mut header: Vec<String> = (1..=m).map(|i| format!("x{i}")).collect();
        for i in 0..m {
            for j in i..m {
                header.push(format!("g{}{}", i + 1, j + 1));
            }
        }
        for h in ["det_g", "lambda_min", "h_norm2", "b_norm2", "schwarz_margin", "z", "lap_z"] {
            header.push(h.into());
        }
        header.extend((1..=n).map(|a| format!("residual{a}")));
        writeln!(w, "{}", header.join(","))?;
        for (r, (z, lap_z, _)) in records.iter().zip(pd) {
            let mut row: Vec<String> = r.x.iter().map(|v| format_f64(*v)).collect();
            for i in 0..m {
                for j in i..m {
                    row.push(format_f64(r.g[i * m + j]));
                }
            }
            for v in [r.det_g, r.lambda_min, r.h_norm2, r.b_norm2, r.schwarz_margin, *z, *lap_z] {
                row.push(format_f64(v));
            }
            row.extend(r.residual.iter().map(|v| format_f64(*v)));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    })
}

fn worst_by<F: Fn(&PointRecord) -> f64>(records: &[PointRecord], key: F, largest: bool) -> (f64, Vec<f64>) {
    let mut best = (if largest { f64::NEG_INFINITY } else { f64::INFINITY }, Vec::new());
    for r in records {
        let v = key(r);
        if (largest && v > best.0) || (!largest && v < best.0) {
            best = (v, r.x.clone());
        }
    }
    best
}

fn level_results(
    c: &RunConfig,
    t: &TranslatorSpec,
    h: f64,
    records: &[PointRecord],
    pd: &[(f64, f64, f64)],
) -> (Vec<CheckResult>, f64) {
    let tol = &c.tolerances;
    let (res, res_at) = worst_by(records, |r| r.residual.iter().fold(0.0_f64, |a, v| a.max(v.abs())), true);
    let (lam, lam_at) = worst_by(records, |r| r.lambda_min, false);
    let (sch, sch_at) = worst_by(records, |r| r.schwarz_margin, false);
    let b_max = records.iter().fold(0.0_f64, |a, r| a.max(r.b_norm2));
    let sch_tol = SCHWARZ_TOL * (1.0 + b_max);
    let (gap, gap_at) = pd
        .iter()
        .zip(records)
        .fold((0.0_f64, Vec::new()), |acc, ((_, _, g), r)| if *g > acc.0 { (*g, r.x.clone()) } else { acc });
    let mut results = vec![
        CheckResult {
            check: "translator_residual".into(),
            h,
            tolerance: tol.residual,
            worst_margin: tol.residual - res,
            worst_value: res,
            worst_location: res_at,
            pass: Some(res <= tol.residual),
            notes: Vec::new(),
            series: Series::default(),
        },
        CheckResult {
            check: "spacelike".into(),
            h,
            tolerance: tol.delta_space,
            worst_margin: lam - tol.delta_space,
            worst_value: lam,
            worst_location: lam_at,
            pass: Some(lam > tol.delta_space),
            notes: vec!["minimum eigenvalue of the induced metric".into()],
            series: Series::default(),
        },
        CheckResult {
            check: "schwarz".into(),
            h,
            tolerance: sch_tol,
            worst_margin: sch,
            worst_value: sch,
            worst_location: sch_at,
            pass: Some(sch >= -sch_tol),
            notes: vec!["||B||^2 - ||H||^2 / m".into()],
            series: Series::default(),
        },
        CheckResult {
            check: "pseudo_distance_laplacian".into(),
            h,
            tolerance: IDENTITY_TOL,
            worst_margin: IDENTITY_TOL - gap,
            worst_value: gap,
            worst_location: gap_at,
            pass: Some(gap <= IDENTITY_TOL),
            notes: vec!["relative gap between 2m + 2<X,H> and the Laplace-Beltrami operator of z".into()],
            series: Series::default(),
        },
    ];
    results.push(info(
        "translating_vector",
        h,
        t.c0,
        Vec::new(),
        vec![format!("<T,T> = {:e}; T is {}", t.c0, t.causal_class)],
    ));
    (results, res)
}

pub fn run(ctx: &Context) -> Result<Verdict, RunError> {
    let mut out = Output::new(ctx.out.clone(), "verify")?;
    let outcome = body(ctx, &mut out);
    out.complete(&ctx.config, outcome)
}

fn body(ctx: &Context, out: &mut Output) -> Result<(), RunError> {
    let c = &ctx.config;
    let t = c.translator()?;
    let opts = diagnostic_options(c);
    let mut residuals = Vec::new();
    for level in 0..=c.h_refine {
        let grid = c.grid_at(level)?;
        let h = grid.h();
        let surface = input_surface(ctx, grid, level)?;
        let records = match pointwise(&surface, &t, &opts) {
            Ok(r) => r,
            Err(e @ Error::NotSpacelike { .. }) => return Err(out.fail(c, "spacelike", h, e)),
            Err(e) => return Err(e.into()),
        };
        let pd = pseudo_distance_rows(&surface, &opts)?;
        let (results, worst_residual) = level_results(c, &t, h, &records, &pd);
        residuals.push((h, worst_residual));
        for r in results {
            out.push(r);
        }
        write_fields(out, &level_name("fields", "csv", level), c.signature.m, c.signature.n, &records, &pd)?;
    }
    if c.h_refine > 0 {
        for r in order_results("translator_residual_order", &residuals) {
            out.push(r);
        }
    }
    Ok(())
}
