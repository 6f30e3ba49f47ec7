use nalgebra::DMatrix;

use super::{norm, radius, CheckResult, DiagnosticOptions, Series, Surface};
use crate::error::Result;
use crate::geometry::{metric_lambda_min, pseudo_distance_at, PointGeometry};
use crate::grid::GridSpec;
use crate::jet::Jet2;

fn det_g(jet: &Jet2) -> f64 {
    let m = jet.m();
    DMatrix::from_fn(m, m, |i, j| {
        let mut v = if i == j { 1.0 } else { 0.0 };
        for a in 0..jet.n() {
            v -= jet.du(a, i) * jet.du(a, j);
        }
        v
    })
    .determinant()
}

/// Nodes on the coordinate axes through the node nearest the origin, one
/// list per axis in increasing coordinate order.
fn ray_nodes(spec: &GridSpec) -> Vec<Vec<usize>> {
    let m = spec.dim();
    let centre: Vec<usize> = (0..m)
        .map(|i| {
            let t = (-spec.lo[i] / spec.spacing(i)).round();
            t.clamp(0.0, (spec.shape[i] - 1) as f64) as usize
        })
        .collect();
    (0..m)
        .map(|axis| {
            (0..spec.shape[axis])
                .map(|k| {
                    let mut idx = centre.clone();
                    idx[axis] = k;
                    spec.flat(&idx)
                })
                .collect()
        })
        .collect()
}

/// Outermost evaluable layer: the faces when the surface has jets there,
/// otherwise the first interior ring.
fn shell_nodes(surface: &Surface) -> Vec<usize> {
    let spec = surface.grid();
    let layer = if surface.evaluable_nodes().len() == spec.len() { 0 } else { 1 };
    (0..spec.len())
        .filter(|&k| spec.boundary_distance(&spec.multi(k)) == layer)
        .collect()
}

struct Sample {
    x: Vec<f64>,
    value: f64,
}

fn sample<F>(surface: &Surface, nodes: &[usize], opts: &DiagnosticOptions, f: F) -> Result<Vec<Sample>>
where
    F: Fn(&Jet2) -> f64 + Sync + Send,
{
    let spec = surface.grid();
    let out = opts.exec.try_map(nodes.len(), |q| -> Result<Option<Sample>> {
        Ok(surface.jet(nodes[q])?.map(|jet| Sample {
            x: spec.coord(&spec.multi(nodes[q])),
            value: f(&jet),
        }))
    })?;
    Ok(out.into_iter().flatten().collect())
}

fn threshold_result(
    check: &str,
    h: f64,
    threshold: f64,
    worst: Option<&Sample>,
    series: Series,
    mut notes: Vec<String>,
) -> CheckResult {
    match worst {
        Some(w) => CheckResult {
            check: check.into(),
            h,
            tolerance: threshold,
            worst_margin: w.value - threshold,
            worst_value: w.value,
            worst_location: w.x.clone(),
            pass: Some(w.value >= threshold),
            notes,
            series,
        },
        None => {
            notes.push("no samples in range".into());
            CheckResult {
                check: check.into(),
                h,
                tolerance: threshold,
                worst_margin: f64::NAN,
                worst_value: f64::NAN,
                worst_location: Vec::new(),
                pass: None,
                notes,
                series,
            }
        }
    }
}

fn min_sample(samples: &[Sample]) -> Option<&Sample> {
    samples.iter().fold(None, |acc: Option<&Sample>, s| match acc {
        Some(a) if a.value <= s.value => Some(a),
        _ => Some(s),
    })
}

/// Metric decay probe `s(x) = |x| lambda_min(g(x))` along the coordinate rays
/// and the outer shell; passes when `min s >= epsilon` over `|x| >= R0`.
pub fn decay_check(surface: &Surface, epsilon: f64, opts: &DiagnosticOptions) -> Result<CheckResult> {
    let spec = surface.grid();
    let r0 = opts.r0.unwrap_or(0.5 * radius(spec));
    let s = |jet: &Jet2| norm(jet.base()) * metric_lambda_min(jet);
    let mut series = Series::new(spec.dim());
    let mut considered = Vec::new();
    for (axis, ray) in ray_nodes(spec).iter().enumerate() {
        let label = format!("ray_x{}", axis + 1);
        for smp in sample(surface, ray, opts, s)? {
            series.push(&smp.x, &label, smp.value);
            if norm(&smp.x) >= r0 {
                considered.push(smp);
            }
        }
    }
    for smp in sample(surface, &shell_nodes(surface), opts, s)? {
        series.push(&smp.x, "shell", smp.value);
        if norm(&smp.x) >= r0 {
            considered.push(smp);
        }
    }
    let notes = vec![format!("R0 = {r0}")];
    Ok(threshold_result("decay", spec.h(), epsilon, min_sample(&considered), series, notes))
}

/// Gauss-image probes through `det g`: its infimum over the grid, and
/// `min |x| det g` over the outer shell, each compared with `epsilon`.
pub fn gauss_image_check(surface: &Surface, epsilon: f64, opts: &DiagnosticOptions) -> Result<Vec<CheckResult>> {
    let spec = surface.grid();
    let all = sample(surface, &surface.evaluable_nodes(), opts, det_g)?;
    let mut series = Series::new(spec.dim());
    for smp in &all {
        series.push(&smp.x, "det_g", smp.value);
    }
    let inf = threshold_result("gauss_image_det", spec.h(), epsilon, min_sample(&all), series, Vec::new());

    let shell = sample(surface, &shell_nodes(surface), opts, |jet| norm(jet.base()) * det_g(jet))?;
    let mut series = Series::new(spec.dim());
    for smp in &shell {
        series.push(&smp.x, "shell_x_det_g", smp.value);
    }
    let shell = threshold_result("gauss_image_shell", spec.h(), epsilon, min_sample(&shell), series, Vec::new());
    Ok(vec![inf, shell])
}

/// Ratio `|grad z| / (|z| + 1)` for the pseudo-distance; informational.
pub fn gradient_estimate_check(surface: &Surface, opts: &DiagnosticOptions) -> Result<CheckResult> {
    let spec = surface.grid();
    let nodes = surface.evaluable_nodes();
    let rows = opts.exec.try_map(nodes.len(), |q| -> Result<Option<(Vec<f64>, f64, f64)>> {
        let Some(jet) = surface.jet(nodes[q])? else {
            return Ok(None);
        };
        let geom = PointGeometry::new(&jet, opts.delta_space)?;
        let pd = pseudo_distance_at(&geom);
        let rho = pd.gradient_norm(&geom) / (pd.z.abs() + 1.0);
        Ok(Some((jet.base().to_vec(), pd.z, rho)))
    })?;
    let mut series = Series::new(spec.dim());
    let mut worst: Option<(Vec<f64>, f64)> = None;
    for (x, z, rho) in rows.into_iter().flatten() {
        series.push(&x, "z", z);
        series.push(&x, "rho", rho);
        if worst.as_ref().is_none_or(|w| rho > w.1) {
            worst = Some((x, rho));
        }
    }
    let (loc, max_rho) = worst.unwrap_or((Vec::new(), f64::NAN));
    Ok(CheckResult {
        check: "gradient_estimate".into(),
        h: spec.h(),
        tolerance: f64::NAN,
        worst_margin: max_rho,
        worst_value: max_rho,
        worst_location: loc,
        pass: None,
        notes: vec!["informational: maximum of |grad z| / (|z| + 1)".into()],
        series,
    })
}
