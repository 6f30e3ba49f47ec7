use serde::Serialize;

use super::metric::{christoffel, metric_core, MetricCore, MetricData};
use crate::ambient::{inner_unchecked, AmbientVector, SpaceSignature, TranslatorSpec};
use crate::error::{Error, Result};
use crate::jet::Jet2;
use crate::scalar::Scalar;

/// Second fundamental form and mean curvature at one point.
///
/// `B_ij` is stored ambient-vector valued (it lies in the normal space), so no
/// sign convention for scalar components leaks into the stored data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtrinsicData {
    pub m: usize,
    /// Row-major `m x m` array of normal vectors.
    pub b: Vec<AmbientVector>,
    pub h: AmbientVector,
    /// `-<H,H>`.
    pub h_norm2: f64,
    /// `-g^ik g^jl <B_ij, B_kl>`.
    pub b_norm2: f64,
    /// Components `H = sum H^a f_a` against the orthonormal normal frame.
    pub h_alpha: Vec<f64>,
    /// Orthonormalized normal frame `f_a` used for `h_alpha`.
    pub normal_frame: Vec<AmbientVector>,
}

impl ExtrinsicData {
    pub fn b(&self, i: usize, j: usize) -> &AmbientVector {
        &self.b[i * self.m + j]
    }

    /// `||B||^2 - ||H||^2 / m`, non-negative by the Schwarz inequality.
    pub fn schwarz_margin(&self) -> f64 {
        self.b_norm2 - self.h_norm2 / self.m as f64
    }
}

pub(crate) fn inner_s<S: Scalar>(v: &[S], w: &[S], m: usize) -> S {
    let mut acc = S::zero();
    for (k, (a, b)) in v.iter().zip(w).enumerate() {
        let p = a.clone() * b.clone();
        acc = if k < m { acc + p } else { acc - p };
    }
    acc
}

/// Tangent frame `e_i = E_i + sum_a u^a_i E_{m+a}`.
pub(crate) fn frame_s<S: Scalar>(jet: &Jet2<S>) -> Vec<Vec<S>> {
    let (m, n) = (jet.m(), jet.n());
    (0..m)
        .map(|i| {
            let mut e = vec![S::zero(); m + n];
            e[i] = S::from_f64(1.0);
            for a in 0..n {
                e[m + a] = jet.du(a, i).clone();
            }
            e
        })
        .collect()
}

pub(crate) struct ExtrinsicCore<S> {
    pub b: Vec<Vec<S>>,
    pub h: Vec<S>,
    pub h_norm2: S,
    pub b_norm2: S,
}

/// `B_ij = (u_ij in the normal directions) - Gamma^k_ij e_k`, which is the
/// normal projection of the ambient second derivative of the immersion.
pub(crate) fn extrinsic_core<S: Scalar>(jet: &Jet2<S>, metric: &MetricCore<S>) -> ExtrinsicCore<S> {
    let (m, n) = (jet.m(), jet.n());
    let frame = frame_s(jet);
    let gamma = christoffel(jet, &metric.g_inv);
    let mut b = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let mut v = vec![S::zero(); m + n];
            for a in 0..n {
                v[m + a] = jet.d2u(a, i, j).clone();
            }
            for (k, e) in frame.iter().enumerate() {
                let c = gamma[(k * m + i) * m + j].clone();
                for (vc, ec) in v.iter_mut().zip(e) {
                    *vc = vc.clone() - c.clone() * ec.clone();
                }
            }
            b.push(v);
        }
    }
    let mut h = vec![S::zero(); m + n];
    for i in 0..m {
        for j in 0..m {
            let gij = metric.g_inv[i * m + j].clone();
            for (hc, bc) in h.iter_mut().zip(&b[i * m + j]) {
                *hc = hc.clone() + gij.clone() * bc.clone();
            }
        }
    }
    let h_norm2 = -inner_s(&h, &h, m);
    // raise both indices of B once, then contract
    let mut b_raised = vec![vec![S::zero(); m + n]; m * m];
    for k in 0..m {
        for l in 0..m {
            for i in 0..m {
                for j in 0..m {
                    let c = metric.g_inv[i * m + k].clone() * metric.g_inv[j * m + l].clone();
                    let target = &mut b_raised[k * m + l];
                    for (t, bc) in target.iter_mut().zip(&b[i * m + j]) {
                        *t = t.clone() + c.clone() * bc.clone();
                    }
                }
            }
        }
    }
    let mut contracted = S::zero();
    for (lower, upper) in b.iter().zip(&b_raised) {
        contracted = contracted + inner_s(lower, upper, m);
    }
    ExtrinsicCore {
        b,
        h,
        h_norm2,
        b_norm2: -contracted,
    }
}

/// `||H||^2` and `||B||^2` for a jet over any scalar type.
pub(crate) fn norm_squares<S: Scalar>(jet: &Jet2<S>) -> (S, S) {
    let core = metric_core(jet);
    let ex = extrinsic_core(jet, &core);
    (ex.h_norm2, ex.b_norm2)
}

pub fn tangent_frame(jet: &Jet2) -> Vec<AmbientVector> {
    frame_s(jet).into_iter().map(AmbientVector).collect()
}

/// Unit normals `(sum_i u^a_i E_i + E_{m+a}) / sqrt(1 - |Du^a|^2)`, one per
/// graph function. Unit timelike but in general not mutually orthogonal.
pub fn graph_unit_normals(jet: &Jet2) -> Result<Vec<AmbientVector>> {
    let (m, n) = (jet.m(), jet.n());
    (0..n)
        .map(|a| {
            let du2: f64 = (0..m).map(|i| jet.du(a, i).powi(2)).sum();
            if du2 >= 1.0 {
                return Err(Error::NotSpacelike {
                    lambda_min: 1.0 - du2,
                    location: jet.base().to_vec(),
                });
            }
            let s = 1.0 / (1.0 - du2).sqrt();
            let mut v = vec![0.0; m + n];
            for (i, vi) in v.iter_mut().take(m).enumerate() {
                *vi = jet.du(a, i) * s;
            }
            v[m + a] = s;
            Ok(AmbientVector(v))
        })
        .collect()
}

/// Gram-Schmidt of [`graph_unit_normals`] under the signature product; the
/// result satisfies `<f_a, f_b> = -delta_ab`.
pub fn orthonormal_normal_frame(jet: &Jet2) -> Result<Vec<AmbientVector>> {
    let m = jet.m();
    let mut out: Vec<AmbientVector> = Vec::with_capacity(jet.n());
    for v in graph_unit_normals(jet)? {
        let mut w = v.0.clone();
        for f in &out {
            let c = inner_unchecked(&v.0, &f.0, m);
            for (wc, fc) in w.iter_mut().zip(&f.0) {
                *wc += c * fc;
            }
        }
        let nn = -inner_unchecked(&w, &w, m);
        if !(nn > 0.0) {
            return Err(Error::NotSpacelike {
                lambda_min: nn,
                location: jet.base().to_vec(),
            });
        }
        let s = 1.0 / nn.sqrt();
        out.push(AmbientVector(w.into_iter().map(|c| c * s).collect()));
    }
    Ok(out)
}

/// Geometry of one spacelike point, computed once and shared by the
/// individual operations.
#[derive(Debug, Clone)]
pub struct PointGeometry {
    pub jet: Jet2,
    pub frame: Vec<AmbientVector>,
    pub metric: MetricData,
    pub extrinsic: ExtrinsicData,
}

impl PointGeometry {
    pub fn new(jet: &Jet2, delta_space: f64) -> Result<Self> {
        let metric = super::metric::induced_metric_with(jet, delta_space)?;
        let (m, n) = (jet.m(), jet.n());
        let core = MetricCore {
            g_inv: metric.g_inv.clone(),
        };
        let ex = extrinsic_core(jet, &core);
        let normal_frame = orthonormal_normal_frame(jet)?;
        let h_alpha = normal_frame
            .iter()
            .map(|f| -inner_unchecked(&ex.h, &f.0, m))
            .collect();
        debug_assert_eq!(normal_frame.len(), n);
        Ok(PointGeometry {
            jet: jet.clone(),
            frame: tangent_frame(jet),
            metric,
            extrinsic: ExtrinsicData {
                m,
                b: ex.b.into_iter().map(AmbientVector).collect(),
                h: AmbientVector(ex.h),
                h_norm2: ex.h_norm2,
                b_norm2: ex.b_norm2,
                h_alpha,
                normal_frame,
            },
        })
    }

    pub fn signature(&self) -> SpaceSignature {
        self.jet.signature()
    }

    /// `V = sum g^ij <v, e_j> e_i` and `v - V`.
    pub fn split(&self, v: &AmbientVector) -> (AmbientVector, AmbientVector) {
        let m = self.jet.m();
        let pairings: Vec<f64> = self.frame.iter().map(|e| inner_unchecked(&v.0, &e.0, m)).collect();
        let mut tangent = vec![0.0; v.len()];
        for i in 0..m {
            let coef: f64 = (0..m).map(|j| self.metric.g_inv(i, j) * pairings[j]).sum();
            for (t, e) in tangent.iter_mut().zip(&self.frame[i].0) {
                *t += coef * e;
            }
        }
        let tangent = AmbientVector(tangent);
        let normal = v.sub(&tangent);
        (tangent, normal)
    }

    /// Contravariant components `V^i = g^ij <v, e_j>` of the tangential part.
    pub fn tangential_components(&self, v: &AmbientVector) -> Vec<f64> {
        let m = self.jet.m();
        let pairings: Vec<f64> = self.frame.iter().map(|e| inner_unchecked(&v.0, &e.0, m)).collect();
        (0..m)
            .map(|i| (0..m).map(|j| self.metric.g_inv(i, j) * pairings[j]).sum())
            .collect()
    }

    pub fn translator_residual(&self, t: &TranslatorSpec) -> Result<Vec<f64>> {
        translator_residual_metric(&self.jet, &self.metric.g_inv, t)
    }
}

pub(crate) fn translator_residual_metric(jet: &Jet2, g_inv: &[f64], t: &TranslatorSpec) -> Result<Vec<f64>> {
    let (m, n) = (jet.m(), jet.n());
    if t.a.len() != m || t.b.len() != n {
        return Err(Error::DimensionMismatch {
            what: "translating vector vs jet",
            expected: m + n,
            got: t.a.len() + t.b.len(),
        });
    }
    Ok((0..n)
        .map(|a| {
            let mut r = -t.b[a];
            for i in 0..m {
                r += t.a[i] * jet.du(a, i);
                for j in 0..m {
                    r += g_inv[i * m + j] * jet.d2u(a, i, j);
                }
            }
            r
        })
        .collect())
}

pub fn second_fundamental_form_with(jet: &Jet2, delta_space: f64) -> Result<ExtrinsicData> {
    Ok(PointGeometry::new(jet, delta_space)?.extrinsic)
}

pub fn second_fundamental_form(jet: &Jet2) -> Result<ExtrinsicData> {
    second_fundamental_form_with(jet, super::DEFAULT_DELTA_SPACE)
}

pub fn tangential_normal_split(v: &AmbientVector, jet: &Jet2) -> Result<(AmbientVector, AmbientVector)> {
    if v.len() != jet.m() + jet.n() {
        return Err(Error::DimensionMismatch {
            what: "ambient vector",
            expected: jet.m() + jet.n(),
            got: v.len(),
        });
    }
    Ok(PointGeometry::new(jet, super::DEFAULT_DELTA_SPACE)?.split(v))
}

/// `r^a = g^ij u^a_ij + a^i u^a_i - b^a`; vanishes exactly where `H = T^perp`.
pub fn translator_residual(jet: &Jet2, t: &TranslatorSpec) -> Result<Vec<f64>> {
    let metric = super::metric::induced_metric(jet)?;
    translator_residual_metric(jet, &metric.g_inv, t)
}
