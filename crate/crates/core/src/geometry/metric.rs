use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::{Jet2, ScalarJet};
use crate::scalar::Scalar;

/// Induced metric data at one point: `g_ij`, `g^ij`, `det g` and the
/// Christoffel symbols `Gamma^k_ij` (flat, `[k][i][j]`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricData {
    pub m: usize,
    pub g: Vec<f64>,
    pub g_inv: Vec<f64>,
    pub det_g: f64,
    pub christoffel: Vec<f64>,
    /// Smallest eigenvalue of `g`.
    pub lambda_min: f64,
}

impl MetricData {
    #[inline]
    pub fn g(&self, i: usize, j: usize) -> f64 {
        self.g[i * self.m + j]
    }

    #[inline]
    pub fn g_inv(&self, i: usize, j: usize) -> f64 {
        self.g_inv[i * self.m + j]
    }

    #[inline]
    pub fn gamma(&self, k: usize, i: usize, j: usize) -> f64 {
        self.christoffel[(k * self.m + i) * self.m + j]
    }
}

pub(crate) struct MetricCore<S> {
    pub g_inv: Vec<S>,
}

/// `g_ij = delta_ij - sum_a u^a_i u^a_j`.
pub(crate) fn metric_tensor<S: Scalar>(jet: &Jet2<S>) -> Vec<S> {
    let (m, n) = (jet.m(), jet.n());
    let mut g = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let mut gij = S::from_f64(if i == j { 1.0 } else { 0.0 });
            for a in 0..n {
                gij = gij - jet.du(a, i).clone() * jet.du(a, j).clone();
            }
            g.push(gij);
        }
    }
    g
}

/// Gauss-Jordan inverse and determinant of a symmetric positive-definite
/// matrix. No pivoting: diagonal pivots of an SPD matrix stay positive.
pub(crate) fn invert_spd<S: Scalar>(a: &[S], m: usize) -> (Vec<S>, S) {
    let mut work: Vec<S> = a.to_vec();
    let mut inv: Vec<S> = (0..m * m)
        .map(|k| S::from_f64(if k / m == k % m { 1.0 } else { 0.0 }))
        .collect();
    let mut det = S::from_f64(1.0);
    for p in 0..m {
        let pivot = work[p * m + p].clone();
        det = det * pivot.clone();
        let rinv = S::from_f64(1.0) / pivot;
        for c in 0..m {
            work[p * m + c] = work[p * m + c].clone() * rinv.clone();
            inv[p * m + c] = inv[p * m + c].clone() * rinv.clone();
        }
        for r in 0..m {
            if r == p {
                continue;
            }
            let f = work[r * m + p].clone();
            for c in 0..m {
                work[r * m + c] = work[r * m + c].clone() - f.clone() * work[p * m + c].clone();
                inv[r * m + c] = inv[r * m + c].clone() - f.clone() * inv[p * m + c].clone();
            }
        }
    }
    // symmetrize to remove elimination-order asymmetry
    for i in 0..m {
        for j in 0..i {
            let avg = (inv[i * m + j].clone() + inv[j * m + i].clone()).scale(0.5);
            inv[i * m + j] = avg.clone();
            inv[j * m + i] = avg;
        }
    }
    (inv, det)
}

pub(crate) fn min_eigenvalue(g: &[f64], m: usize) -> f64 {
    match m {
        1 => g[0],
        2 => {
            let (a, b, d) = (g[0], 0.5 * (g[1] + g[2]), g[3]);
            let mean = 0.5 * (a + d);
            let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
            // smaller root through the product to avoid cancellation
            let hi = mean + rad;
            let det = a * d - b * b;
            if hi > 0.0 {
                det / hi
            } else {
                mean - rad
            }
        }
        _ => DMatrix::from_row_slice(m, m, g)
            .symmetric_eigenvalues()
            .iter()
            .fold(f64::INFINITY, |acc, v| acc.min(*v)),
    }
}

pub(crate) fn metric_core<S: Scalar>(jet: &Jet2<S>) -> MetricCore<S> {
    let g = metric_tensor(jet);
    let (g_inv, _) = invert_spd(&g, jet.m());
    MetricCore { g_inv }
}

/// `Gamma^k_ij = -g^{kl} u^a_ij u^a_l`.
pub(crate) fn christoffel<S: Scalar>(jet: &Jet2<S>, g_inv: &[S]) -> Vec<S> {
    let (m, n) = (jet.m(), jet.n());
    // lowered symbols Gamma_ijl = -u^a_ij u^a_l
    let mut out = vec![S::zero(); m * m * m];
    for i in 0..m {
        for j in 0..m {
            let lowered: Vec<S> = (0..m)
                .map(|l| {
                    let mut s = S::zero();
                    for a in 0..n {
                        s = s - jet.d2u(a, i, j).clone() * jet.du(a, l).clone();
                    }
                    s
                })
                .collect();
            for k in 0..m {
                let mut s = S::zero();
                for (l, low) in lowered.iter().enumerate() {
                    s = s + g_inv[k * m + l].clone() * low.clone();
                }
                out[(k * m + i) * m + j] = s;
            }
        }
    }
    out
}

/// Smallest eigenvalue of the induced metric, without inverting it.
pub fn metric_lambda_min(jet: &Jet2) -> f64 {
    min_eigenvalue(&metric_tensor(jet), jet.m())
}

/// Induced metric, inverse, determinant and connection; fails with
/// [`Error::NotSpacelike`] when `lambda_min(g) <= delta_space`.
pub fn induced_metric_with(jet: &Jet2, delta_space: f64) -> Result<MetricData> {
    let m = jet.m();
    let g = metric_tensor(jet);
    let lambda_min = min_eigenvalue(&g, m);
    if !(lambda_min > delta_space) {
        return Err(Error::NotSpacelike {
            lambda_min,
            location: jet.base().to_vec(),
        });
    }
    let (g_inv, det_g) = invert_spd(&g, m);
    let christoffel = christoffel(jet, &g_inv);
    Ok(MetricData {
        m,
        g,
        g_inv,
        det_g,
        christoffel,
        lambda_min,
    })
}

pub fn induced_metric(jet: &Jet2) -> Result<MetricData> {
    induced_metric_with(jet, super::DEFAULT_DELTA_SPACE)
}

/// Laplace-Beltrami `g^ij (f_ij - Gamma^k_ij f_k)` of a scalar field given
/// by its coordinate jet.
pub fn laplace_beltrami(field: &ScalarJet, metric: &MetricData) -> f64 {
    let m = metric.m;
    let mut acc = 0.0;
    for i in 0..m {
        for j in 0..m {
            let mut cov = field.hess[i * m + j];
            for k in 0..m {
                cov -= metric.gamma(k, i, j) * field.grad[k];
            }
            acc += metric.g_inv(i, j) * cov;
        }
    }
    acc
}
