//! Residual and analytic Jacobian of the discrete translator system.
//!
//! Unknowns are the values `u^a` at interior nodes, stacked node-major:
//! unknown `p * n + a` is component `a` at the `p`-th interior node.

use faer::sparse::{SparseColMat, Triplet};

use crate::ambient::TranslatorSpec;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{invert_spd, metric_tensor, min_eigenvalue, translator_residual_metric};
use crate::grid::{GridField, GridSpec};
use crate::jet::Jet2;

/// Interior nodes of a grid and the inverse map from flat node to unknown
/// block.
#[derive(Debug, Clone)]
pub struct Interior {
    pub nodes: Vec<usize>,
    position: Vec<Option<usize>>,
}

impl Interior {
    pub fn new(spec: &GridSpec) -> Self {
        let nodes = spec.nodes_with_margin(1);
        let mut position = vec![None; spec.len()];
        for (p, &k) in nodes.iter().enumerate() {
            position[k] = Some(p);
        }
        Interior { nodes, position }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn position(&self, flat: usize) -> Option<usize> {
        self.position[flat]
    }
}

/// Stacked residual over interior nodes.
#[derive(Debug, Clone)]
pub struct Residual {
    pub n: usize,
    pub values: Vec<f64>,
    /// Smallest eigenvalue of the induced metric over interior nodes.
    pub lambda_min: f64,
}

impl Residual {
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Residual of component `a` at interior position `p`.
    pub fn at(&self, p: usize, a: usize) -> f64 {
        self.values[p * self.n + a]
    }
}

struct NodeEval {
    residual: Vec<f64>,
    lambda: f64,
}

fn check_dims(state: &GridField, t: &TranslatorSpec) -> Result<()> {
    let (m, n) = (state.spec().dim(), state.n());
    if t.a.len() != m || t.b.len() != n {
        return Err(Error::DimensionMismatch {
            what: "translating vector vs grid field",
            expected: m + n,
            got: t.a.len() + t.b.len(),
        });
    }
    Ok(())
}

fn not_spacelike(spec: &GridSpec, flat: usize, lambda: f64) -> Error {
    Error::NotSpacelike {
        lambda_min: lambda,
        location: spec.coord(&spec.multi(flat)),
    }
}

/// Translator residual `g^ij u^a_ij + a^i u^a_i - b^a` at every interior
/// node from central-difference jets. Fails with the worst node if the
/// induced metric has an eigenvalue `<= threshold` anywhere.
pub fn assemble_residual(state: &GridField, t: &TranslatorSpec, threshold: f64, exec: Execution) -> Result<Residual> {
    check_dims(state, t)?;
    let spec = state.spec();
    let interior = Interior::new(spec);
    let m = spec.dim();
    let evals = exec.try_map(interior.len(), |p| -> Result<NodeEval> {
        let jet = state.fd_jet(&spec.multi(interior.nodes[p]))?;
        let g = metric_tensor(&jet);
        let lambda = min_eigenvalue(&g, m);
        if !(lambda > threshold) {
            return Ok(NodeEval {
                residual: Vec::new(),
                lambda,
            });
        }
        let (g_inv, _) = invert_spd(&g, m);
        Ok(NodeEval {
            residual: translator_residual_metric(&jet, &g_inv, t)?,
            lambda,
        })
    })?;
    let (worst, lambda_min) = evals
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(wp, wl), (p, e)| if e.lambda < wl { (p, e.lambda) } else { (wp, wl) });
    if !(lambda_min > threshold) {
        return Err(not_spacelike(spec, interior.nodes[worst], lambda_min));
    }
    Ok(Residual {
        n: state.n(),
        values: evals.into_iter().flat_map(|e| e.residual).collect(),
        lambda_min,
    })
}

/// Sparse Jacobian in coordinate form, rows and columns indexed like the
/// stacked residual.
#[derive(Debug, Clone)]
pub struct Jacobian {
    pub dim: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl Jacobian {
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.dim]; self.dim];
        for &(r, c, v) in &self.entries {
            d[r][c] += v;
        }
        d
    }

    pub fn to_sparse(&self) -> Result<SparseColMat<usize, f64>> {
        let triplets: Vec<Triplet<usize, usize, f64>> =
            self.entries.iter().map(|&(row, col, val)| Triplet { row, col, val }).collect();
        SparseColMat::try_new_from_triplets(self.dim, self.dim, &triplets)
            .map_err(|e| Error::LinearSolve(format!("building the sparse Jacobian: {e:?}")))
    }
}

/// One stencil point: flat offset from the centre, weight of the point in
/// each first derivative and in each (symmetric) second derivative.
struct StencilPoint {
    offset: isize,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

fn stencil(spec: &GridSpec) -> Vec<StencilPoint> {
    let m = spec.dim();
    let h = spec.spacings();
    let strides: Vec<isize> = spec.strides().into_iter().map(|s| s as isize).collect();
    let mut pts = Vec::new();
    let mut center = StencilPoint {
        offset: 0,
        d1: vec![0.0; m],
        d2: vec![0.0; m * m],
    };
    for i in 0..m {
        center.d2[i * m + i] = -2.0 / (h[i] * h[i]);
    }
    pts.push(center);
    for i in 0..m {
        for s in [1.0, -1.0] {
            let mut p = StencilPoint {
                offset: s as isize * strides[i],
                d1: vec![0.0; m],
                d2: vec![0.0; m * m],
            };
            p.d1[i] = s / (2.0 * h[i]);
            p.d2[i * m + i] = 1.0 / (h[i] * h[i]);
            pts.push(p);
        }
    }
    for i in 0..m {
        for j in 0..i {
            for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let mut p = StencilPoint {
                    offset: si as isize * strides[i] + sj as isize * strides[j],
                    d1: vec![0.0; m],
                    d2: vec![0.0; m * m],
                };
                let w = si * sj / (4.0 * h[i] * h[j]);
                p.d2[i * m + j] = w;
                p.d2[j * m + i] = w;
                pts.push(p);
            }
        }
    }
    pts
}

/// Exact derivative of the stacked residual with respect to the interior
/// unknowns, including the dependence of `g^ij` on `Du`:
///
/// `dr^a/du^b(q) = delta_ab (g^ij W_ij(q) + a^k W_k(q)) + C^ab_k W_k(q)`,
/// `C^ab_k = 2 g^ki u^a_ij w^bj`, `w^b = g^{-1} Du^b`,
///
/// where `W_k`, `W_ij` are the stencil weights of node `q`.
pub fn assemble_jacobian(state: &GridField, t: &TranslatorSpec, exec: Execution) -> Result<Jacobian> {
    check_dims(state, t)?;
    let spec = state.spec();
    let interior = Interior::new(spec);
    let (m, n) = (spec.dim(), state.n());
    let pts = stencil(spec);
    let blocks = exec.try_map(interior.len(), |p| -> Result<Vec<(usize, usize, f64)>> {
        let centre = interior.nodes[p];
        let jet = state.fd_jet(&spec.multi(centre))?;
        let g = metric_tensor(&jet);
        let lambda = min_eigenvalue(&g, m);
        if !(lambda > 0.0) {
            return Err(not_spacelike(spec, centre, lambda));
        }
        let (g_inv, _) = invert_spd(&g, m);
        let coupling = coupling(&jet, &g_inv);
        let mut out = Vec::with_capacity(pts.len() * n * n);
        for pt in &pts {
            let q = (centre as isize + pt.offset) as usize;
            let Some(col_block) = interior.position(q) else {
                continue;
            };
            let mut diag = 0.0;
            for i in 0..m {
                diag += t.a[i] * pt.d1[i];
                for j in 0..m {
                    diag += g_inv[i * m + j] * pt.d2[i * m + j];
                }
            }
            for a in 0..n {
                for b in 0..n {
                    let mut v = if a == b { diag } else { 0.0 };
                    for k in 0..m {
                        v += coupling[(a * n + b) * m + k] * pt.d1[k];
                    }
                    if v != 0.0 {
                        out.push((p * n + a, col_block * n + b, v));
                    }
                }
            }
        }
        Ok(out)
    })?;
    Ok(Jacobian {
        dim: interior.len() * n,
        entries: blocks.into_iter().flatten().collect(),
    })
}

/// `C^ab_k` stored at `(a * n + b) * m + k`.
fn coupling(jet: &Jet2, g_inv: &[f64]) -> Vec<f64> {
    let (m, n) = (jet.m(), jet.n());
    let w: Vec<f64> = (0..n)
        .flat_map(|b| (0..m).map(move |j| (b, j)))
        .map(|(b, j)| (0..m).map(|l| g_inv[j * m + l] * jet.du(b, l)).sum())
        .collect();
    let mut c = vec![0.0; n * n * m];
    for a in 0..n {
        for b in 0..n {
            for k in 0..m {
                let mut s = 0.0;
                for i in 0..m {
                    for j in 0..m {
                        s += g_inv[k * m + i] * jet.d2u(a, i, j) * w[b * m + j];
                    }
                }
                c[(a * n + b) * m + k] = 2.0 * s;
            }
        }
    }
    c
}

/// Discrete harmonic extension: boundary values kept, interior values solving
/// the flat five-point (in general `2m+1`-point) Laplace equation.
pub fn harmonic_lift(state: &GridField) -> Result<GridField> {
    use faer::linalg::solvers::Solve;

    let spec = state.spec();
    let interior = Interior::new(spec);
    let (m, n) = (spec.dim(), state.n());
    let h = spec.spacings();
    let strides = spec.strides();
    let mut triplets = Vec::with_capacity(interior.len() * (2 * m + 1));
    let mut rhs = faer::Mat::<f64>::zeros(interior.len(), n);
    for (p, &k) in interior.nodes.iter().enumerate() {
        let mut diag = 0.0;
        for i in 0..m {
            let w = 1.0 / (h[i] * h[i]);
            diag -= 2.0 * w;
            for q in [k + strides[i], k - strides[i]] {
                match interior.position(q) {
                    Some(col) => triplets.push(Triplet { row: p, col, val: w }),
                    None => {
                        for a in 0..n {
                            rhs[(p, a)] -= w * state.at(a, q);
                        }
                    }
                }
            }
        }
        triplets.push(Triplet { row: p, col: p, val: diag });
    }
    let lu = SparseColMat::try_new_from_triplets(interior.len(), interior.len(), &triplets)
        .map_err(|e| Error::LinearSolve(format!("building the Laplacian: {e:?}")))?
        .sp_lu()
        .map_err(|e| Error::LinearSolve(format!("sparse LU of the Laplacian: {e:?}")))?;
    let sol = lu.solve(&rhs);
    let mut samples = state.samples().to_vec();
    for (p, &k) in interior.nodes.iter().enumerate() {
        for a in 0..n {
            samples[a][k] = sol[(p, a)];
        }
    }
    GridField::new(spec.clone(), samples)
}
