use super::*;
use crate::ambient::TranslatorSpec;
use crate::solver::{continuation_sweep, newton_solve, TranslatorProblem};

const EQ16: &str = "ln(1+exp(2*x1))-x1; 0.5*x2";
const PLANE: &str = "0.5*x1; 0.3*x2";

fn exprs(src: &str) -> Vec<Expression> {
    Expression::parse_list(src, 2).unwrap()
}

fn eq16_t() -> TranslatorSpec {
    TranslatorSpec::new(vec![0.0, 1.0], vec![1.0, 0.5]).unwrap()
}

fn plane_t() -> TranslatorSpec {
    TranslatorSpec::new(vec![1.0, 0.0], vec![0.5, 0.0]).unwrap()
}

fn analytic(src: &str, r: f64, h: f64) -> Surface {
    Surface::analytic(exprs(src), GridSpec::centered(2, r, h).unwrap()).unwrap()
}

/// `cosh^2 (cosh^2 + 2 sinh^2)`, the closed-form margin for both
/// inequalities on the `m = n = 2` fixture.
fn closed_margin(x1: f64) -> f64 {
    let (c, s) = (x1.cosh(), x1.sinh());
    c * c * (c * c + 2.0 * s * s)
}

fn value_near(series: &Series, quantity: &str, x: &[f64]) -> (Vec<f64>, f64) {
    series
        .values(quantity)
        .into_iter()
        .min_by(|a, b| {
            let d = |p: &[f64]| p.iter().zip(x).map(|(u, v)| (u - v).powi(2)).sum::<f64>();
            d(&a.0).total_cmp(&d(&b.0))
        })
        .unwrap()
}

#[test]
fn closed_form_margins_with_exact_jets() {
    let surface = analytic(EQ16, 2.0, 0.1);
    let opts = DiagnosticOptions::default();
    for check in [prop31_check, prop32_check] {
        let r = check(&surface, &eq16_t(), &opts).unwrap();
        assert_eq!(r.pass, Some(true));
        assert!(r.worst_margin >= 1.0 - 1e-10, "{}", r.worst_margin);
        assert!(r.worst_location[0].abs() < 1e-12);
        for x1 in [0.0, 0.5, 1.0, -1.5] {
            let (x, m) = value_near(&r.series, "margin", &[x1, 0.3]);
            assert!((m - closed_margin(x[0])).abs() <= 1e-8 * closed_margin(x[0]), "{x:?}: {m}");
        }
    }
    assert!((closed_margin(1.0) - 12.2468).abs() < 1e-3);
}

#[test]
fn plane_margins_vanish() {
    let surface = analytic(PLANE, 1.0, 0.25);
    for check in [prop31_check, prop32_check] {
        let r = check(&surface, &plane_t(), &DiagnosticOptions::default()).unwrap();
        assert_eq!(r.pass, Some(true));
        assert!(r.series.values("margin").iter().all(|(_, v)| v.abs() < 1e-14));
    }
}

#[test]
fn non_translators_rejected() {
    let t = TranslatorSpec::new(vec![1.0, 0.0], vec![0.0, 0.0]).unwrap();
    assert!(matches!(
        prop31_check(&analytic(PLANE, 1.0, 0.25), &t, &DiagnosticOptions::default()),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn discrete_margins_converge_at_second_order() {
    let opts = DiagnosticOptions {
        translator_tol: 1.0,
        ..DiagnosticOptions::default()
    };
    let probe = [0.5, 0.0];
    let err = |h: f64| {
        let spec = GridSpec::centered(2, 1.0, h).unwrap();
        let field = GridField::from_expressions(spec, &exprs(EQ16), Execution::Sequential).unwrap();
        let r = prop31_check(&Surface::discrete(field, None).unwrap(), &eq16_t(), &opts).unwrap();
        let (x, m) = value_near(&r.series, "margin", &probe);
        assert!((x[0] - 0.5).abs() < 1e-12);
        (m - closed_margin(0.5)).abs()
    };
    let errs = [err(0.1), err(0.05), err(0.025)];
    for w in errs.windows(2) {
        assert!(crate::richardson::observed_order(w[0], w[1]) >= 1.9, "{errs:?}");
    }
}

#[test]
fn solver_output_meets_calibrated_budget() {
    let spec = GridSpec::centered(2, 1.0, 0.05).unwrap();
    let report = newton_solve(&TranslatorProblem::new(spec, eq16_t(), exprs(PLANE)).unwrap()).unwrap();
    assert!(report.converged);
    let surface = Surface::discrete(report.solution, Some(exprs(PLANE))).unwrap();
    let opts = DiagnosticOptions::default();
    for check in [prop31_check, prop32_check] {
        let r = check(&surface, &eq16_t(), &opts).unwrap();
        assert!(r.tolerance > 0.0 && r.tolerance.is_finite());
        assert_eq!(r.pass, Some(true), "{r:?}");
    }
}

#[test]
fn decay_of_plane_and_closed_form() {
    let plane = analytic(PLANE, 4.0, 0.1);
    let opts = DiagnosticOptions::default();
    let r = decay_check(&plane, 0.5, &opts).unwrap();
    assert_eq!(r.pass, Some(true));
    assert!((r.worst_value - 2.0 * 0.75).abs() < 1e-12);
    let shell_only = DiagnosticOptions {
        r0: Some(4.0),
        ..opts
    };
    let r = decay_check(&plane, 0.5, &shell_only).unwrap();
    assert!((r.worst_value - 3.0).abs() < 1e-12);

    let eq16 = analytic(EQ16, 4.0, 0.1);
    let r = decay_check(&eq16, 0.5, &opts).unwrap();
    assert_eq!(r.pass, Some(false));
    let want = 4.0 / 4.0_f64.cosh().powi(2);
    assert!((r.worst_value - want).abs() < 1e-12);
    assert!((r.worst_value - 0.00537).abs() < 1e-5);
    assert!((r.worst_location[0].abs() - 4.0).abs() < 1e-12 && r.worst_location[1].abs() < 1e-12);
    let ray: Vec<(Vec<f64>, f64)> = r.series.values("ray_x1").into_iter().filter(|(x, _)| x[0] >= 1.0).collect();
    for w in ray.windows(2) {
        assert!(w[1].1 < w[0].1);
    }
}

#[test]
fn gauss_image_probes() {
    let opts = DiagnosticOptions::default();
    let r = gauss_image_check(&analytic(PLANE, 4.0, 0.5), 0.1, &opts).unwrap();
    assert!((r[0].worst_value - 0.6825).abs() < 1e-12);
    assert_eq!(r[0].pass, Some(true));

    let r = gauss_image_check(&analytic(EQ16, 4.0, 0.1), 0.1, &opts).unwrap();
    let want = 0.75 / 4.0_f64.cosh().powi(2);
    assert!((r[0].worst_value - want).abs() < 1e-12);
    assert!((r[0].worst_value - 0.0010057).abs() < 1e-6);
    assert_eq!(r[0].pass, Some(false));

    let r = gauss_image_check(&analytic("0; 0", 1.0, 0.25), 0.1, &opts).unwrap();
    assert!(r[0].series.values("det_g").iter().all(|(_, v)| *v == 1.0));
}

#[test]
fn gradient_estimate_samples() {
    let r = gradient_estimate_check(&analytic(PLANE, 2.0, 0.5), &DiagnosticOptions::default()).unwrap();
    assert_eq!(r.pass, None);
    let (_, rho) = value_near(&r.series, "rho", &[1.0, 0.0]);
    let want = 1.5 / 0.75_f64.sqrt() / 1.75;
    assert!((rho - want).abs() < 1e-12);
    assert!((rho - 0.990).abs() < 1e-3);
    let (_, rho0) = value_near(&r.series, "rho", &[0.0, 0.0]);
    assert_eq!(rho0, 0.0);

    let r = gradient_estimate_check(&analytic(EQ16, 2.0, 0.1), &DiagnosticOptions::default()).unwrap();
    assert!(r.worst_value.is_finite());
}

#[test]
fn rigidity_of_plane_sweep() {
    let boxes: Vec<GridSpec> = (1..=2).map(|k| GridSpec::centered(2, k as f64, 0.25).unwrap()).collect();
    let p = TranslatorProblem::new(boxes[0].clone(), plane_t(), exprs(PLANE)).unwrap();
    let sweep = continuation_sweep(&p, &boxes).unwrap();
    let rep = rigidity_sweep(&sweep, &plane_t(), 1e-8, None).unwrap();
    assert_eq!(rep.causal_class, crate::CausalClass::Spacelike);
    assert_eq!(rep.rows.len(), 2);
    for r in &rep.rows {
        assert!(r.deviation <= 1e-8);
        assert!(r.flat_translator);
    }
}

#[test]
fn pointwise_records_and_degeneracy() {
    let t = TranslatorSpec::new(vec![1.0, 0.0], vec![0.0, 0.0]).unwrap();
    let recs = pointwise(&analytic(PLANE, 1.0, 0.25), &t, &DiagnosticOptions::default()).unwrap();
    assert_eq!(recs.len(), 81);
    for r in &recs {
        assert!((r.det_g - 0.6825).abs() < 1e-12);
        assert!((r.residual[0] - 0.5).abs() < 1e-12);
    }
    assert!(matches!(
        pointwise(&analytic("x1; 0", 1.0, 0.25), &t, &DiagnosticOptions::default()),
        Err(Error::NotSpacelike { .. })
    ));
}

#[test]
fn series_csv_layout() {
    let mut s = Series::new(2);
    s.push(&[0.5, -1.0], "margin", 1.0);
    let mut buf = Vec::new();
    s.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(
        text,
        "x1,x2,quantity,value\n5.0000000000000000e-1,-1.0000000000000000e0,margin,1.0000000000000000e0\n"
    );
}
