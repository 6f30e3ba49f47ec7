use faer::linalg::solvers::Solve;
use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::assembly::{assemble_jacobian, assemble_residual, harmonic_lift, Interior};
use super::fit::AffinePlane;
use super::{InitialGuess, SolveReport, TranslatorProblem, DIRICHLET_NOTE};
use crate::error::{Error, Result};
use crate::expr::analytic_jet;
use crate::geometry::metric_lambda_min;
use crate::grid::GridField;

/// Boundary nodes carry the Dirichlet data, interior nodes the initial guess.
pub fn initial_state(p: &TranslatorProblem) -> Result<GridField> {
    p.validate()?;
    let spec = &p.grid;
    let n = p.sig.n;
    let interior = Interior::new(spec);
    let boundary_nodes: Vec<usize> = (0..spec.len()).filter(|&k| interior.position(k).is_none()).collect();
    let exec = p.options.exec;

    let boundary_values = exec.try_map(boundary_nodes.len(), |b| -> Result<(Vec<f64>, f64)> {
        let x = spec.coord(&spec.multi(boundary_nodes[b]));
        let jet = analytic_jet(&p.boundary, &x)?;
        Ok((jet.values().to_vec(), metric_lambda_min(&jet)))
    })?;
    let threshold = p.options.delta_space;
    if let Some((b, (_, lambda))) = boundary_values
        .iter()
        .enumerate()
        .filter(|(_, (_, l))| !(*l > threshold))
        .min_by(|x, y| x.1 .1.total_cmp(&y.1 .1))
    {
        return Err(Error::NotSpacelike {
            lambda_min: *lambda,
            location: spec.coord(&spec.multi(boundary_nodes[b])),
        });
    }

    let mut samples = vec![vec![0.0; spec.len()]; n];
    for (b, (v, _)) in boundary_values.iter().enumerate() {
        for a in 0..n {
            samples[a][boundary_nodes[b]] = v[a];
        }
    }

    let fit = || -> Result<AffinePlane> {
        let points: Vec<Vec<f64>> = boundary_nodes.iter().map(|&k| spec.coord(&spec.multi(k))).collect();
        let values: Vec<Vec<f64>> = (0..n).map(|a| boundary_values.iter().map(|(v, _)| v[a]).collect()).collect();
        AffinePlane::fit(&points, &values)
    };
    let interior_values: Vec<Vec<f64>> = match &p.initial_guess {
        InitialGuess::AffineFit => {
            let plane = fit()?;
            exec.map(interior.len(), |q| plane.eval(&spec.coord(&spec.multi(interior.nodes[q]))))
        }
        InitialGuess::Random { seed, amplitude } => {
            let plane = fit()?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            interior
                .nodes
                .iter()
                .map(|&k| {
                    let mut v = plane.eval(&spec.coord(&spec.multi(k)));
                    for c in &mut v {
                        *c += amplitude * rng.gen_range(-1.0..=1.0);
                    }
                    v
                })
                .collect()
        }
        InitialGuess::Expressions(exprs) => exec.try_map(interior.len(), |q| {
            let x = spec.coord(&spec.multi(interior.nodes[q]));
            exprs.iter().map(|e| e.eval(&x)).collect::<Result<Vec<f64>>>()
        })?,
        InitialGuess::Field(f) => interior
            .nodes
            .iter()
            .map(|&k| (0..n).map(|a| f.at(a, k)).collect())
            .collect(),
    };
    for (q, v) in interior_values.iter().enumerate() {
        for a in 0..n {
            samples[a][interior.nodes[q]] = v[a];
        }
    }
    GridField::new(spec.clone(), samples)
}

/// The initial state, pulled toward the harmonic lift of the boundary data by repeated
/// halving of `theta` in `fit + theta (guess - fit)` until every interior node
/// is spacelike. Returns the state and the final `theta`.
fn spacelike_start(p: &TranslatorProblem, threshold: f64) -> Result<(GridField, f64)> {
    let guess = initial_state(p)?;
    let first = match assemble_residual(&guess, &p.translator, threshold, p.options.exec) {
        Ok(_) => return Ok((guess, 1.0)),
        Err(e @ Error::NotSpacelike { .. }) => e,
        Err(e) => return Err(e),
    };
    let fit = harmonic_lift(&guess)?;
    let mut theta = 1.0;
    for _ in 0..p.options.max_backtracks {
        theta *= 0.5;
        let samples = guess
            .samples()
            .iter()
            .zip(fit.samples())
            .map(|(g, f)| g.iter().zip(f).map(|(g, f)| f + theta * (g - f)).collect())
            .collect();
        let blended = GridField::new(p.grid.clone(), samples)?;
        match assemble_residual(&blended, &p.translator, threshold, p.options.exec) {
            Ok(_) => return Ok((blended, theta)),
            Err(Error::NotSpacelike { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    match assemble_residual(&fit, &p.translator, threshold, p.options.exec) {
        Ok(_) => Ok((fit, 0.0)),
        Err(_) => Err(first),
    }
}

fn with_step(state: &GridField, interior: &Interior, delta: &[f64], step: f64) -> Result<GridField> {
    let n = state.n();
    let mut samples = state.samples().to_vec();
    for (p, &k) in interior.nodes.iter().enumerate() {
        for a in 0..n {
            samples[a][k] += step * delta[p * n + a];
        }
    }
    GridField::new(state.spec().clone(), samples)
}

/// Damped Newton iteration on the stacked residual.
///
/// Each step solves `J d = -r` by sparse LU and halves the step until the
/// iterate stays spacelike and the residual sup-norm strictly drops. If no
/// step length is accepted and the shortest trial was rejected for losing
/// spacelikeness, the solve fails with [`Error::DegenerateSolution`]; if it
/// was rejected only for not decreasing the residual, the report comes back
/// with `converged = false`.
pub fn newton_solve(p: &TranslatorProblem) -> Result<SolveReport> {
    let opts = p.options;
    let threshold = opts.spacelike_threshold();
    let t = &p.translator;
    let interior = Interior::new(&p.grid);

    let (mut state, blend) = spacelike_start(p, threshold)?;
    let mut res = assemble_residual(&state, t, threshold, opts.exec)?;
    let note = if blend < 1.0 {
        format!("{DIRICHLET_NOTE}; initial guess blended toward the harmonic lift of the boundary data with weight {blend}")
    } else {
        DIRICHLET_NOTE.to_string()
    };
    let mut history = vec![res.sup_norm()];
    let mut steps = Vec::new();
    let report = |state: GridField, res: &super::Residual, history: Vec<f64>, steps: Vec<f64>, converged: bool| {
        SolveReport {
            converged,
            iterations: steps.len(),
            final_residual_inf: res.sup_norm(),
            spacelike_min_eig: res.lambda_min,
            residual_history: history,
            step_lengths: steps,
            solution: state,
            note: note.clone(),
        }
    };

    loop {
        if res.sup_norm() <= opts.residual_tol {
            return Ok(report(state, &res, history, steps, true));
        }
        if steps.len() >= opts.max_iter {
            return Ok(report(state, &res, history, steps, false));
        }
        let jac = assemble_jacobian(&state, t, opts.exec)?;
        let lu = jac
            .to_sparse()?
            .sp_lu()
            .map_err(|e| Error::LinearSolve(format!("sparse LU of the Newton Jacobian: {e:?}")))?;
        let rhs = Mat::from_fn(jac.dim, 1, |i, _| -res.values[i]);
        let sol = lu.solve(&rhs);
        let delta: Vec<f64> = (0..jac.dim).map(|i| sol[(i, 0)]).collect();
        if delta.iter().any(|d| !d.is_finite()) {
            return Err(Error::LinearSolve("Newton step is not finite (singular Jacobian)".into()));
        }

        let current = res.sup_norm();
        let mut step = 1.0;
        let mut accepted = None;
        let mut last_rejected_spacelike = false;
        for _ in 0..=opts.max_backtracks {
            let trial = with_step(&state, &interior, &delta, step)?;
            match assemble_residual(&trial, t, threshold, opts.exec) {
                Ok(r) if r.sup_norm() < current => {
                    accepted = Some((trial, r));
                    break;
                }
                Ok(_) => last_rejected_spacelike = false,
                Err(Error::NotSpacelike { .. }) => last_rejected_spacelike = true,
                Err(e) => return Err(e),
            }
            step *= 0.5;
        }
        match accepted {
            Some((trial, r)) => {
                state = trial;
                res = r;
                history.push(res.sup_norm());
                steps.push(step);
            }
            None if last_rejected_spacelike => {
                return Err(Error::DegenerateSolution(format!(
                    "step underflow after {} halvings: every trial iterate lost spacelikeness (residual {current:e} after {} iterations)",
                    opts.max_backtracks,
                    steps.len()
                )));
            }
            None => return Ok(report(state, &res, history, steps, false)),
        }
    }
}
