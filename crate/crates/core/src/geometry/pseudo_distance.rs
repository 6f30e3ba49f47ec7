use serde::Serialize;

use super::extrinsic::PointGeometry;
use crate::ambient::inner_unchecked;
use crate::error::Result;
use crate::jet::{Jet2, ScalarJet};

/// `z = <X,X>` with its first covariant derivatives, covariant Hessian and
/// Laplacian, all from the identities in terms of `e_i`, `B_ij` and `H`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PseudoDistance {
    pub z: f64,
    /// `z_,i = 2 <X, e_i>`.
    pub grad_z: Vec<f64>,
    /// `z_,ij = 2 (g_ij + <X, B_ij>)`.
    pub hess_z: Vec<f64>,
    /// `2m + 2 <X, H>`.
    pub lap_z: f64,
}

impl PseudoDistance {
    /// `|grad z| = (g^ij z_,i z_,j)^(1/2)`.
    pub fn gradient_norm(&self, geom: &PointGeometry) -> f64 {
        let m = self.grad_z.len();
        let mut s = 0.0;
        for i in 0..m {
            for j in 0..m {
                s += geom.metric.g_inv(i, j) * self.grad_z[i] * self.grad_z[j];
            }
        }
        s.max(0.0).sqrt()
    }
}

/// Position vector `X = (x, u(x))`.
pub fn position(jet: &Jet2) -> Vec<f64> {
    jet.base().iter().copied().chain(jet.values().iter().copied()).collect()
}

pub fn pseudo_distance_at(geom: &PointGeometry) -> PseudoDistance {
    let m = geom.jet.m();
    let x = position(&geom.jet);
    let z = inner_unchecked(&x, &x, m);
    let grad_z = geom.frame.iter().map(|e| 2.0 * inner_unchecked(&x, &e.0, m)).collect();
    let mut hess_z = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            hess_z[i * m + j] = 2.0 * (geom.metric.g(i, j) + inner_unchecked(&x, &geom.extrinsic.b(i, j).0, m));
        }
    }
    let lap_z = 2.0 * m as f64 + 2.0 * inner_unchecked(&x, &geom.extrinsic.h.0, m);
    PseudoDistance {
        z,
        grad_z,
        hess_z,
        lap_z,
    }
}

pub fn pseudo_distance(jet: &Jet2) -> Result<PseudoDistance> {
    Ok(pseudo_distance_at(&PointGeometry::new(jet, super::DEFAULT_DELTA_SPACE)?))
}

/// Coordinate jet of `z(x) = |x|^2 - |u(x)|^2` by direct differentiation.
pub fn pseudo_distance_coordinate_jet(jet: &Jet2) -> ScalarJet {
    let (m, n) = (jet.m(), jet.n());
    let x = jet.base();
    let value = x.iter().map(|c| c * c).sum::<f64>() - jet.values().iter().map(|c| c * c).sum::<f64>();
    let grad = (0..m)
        .map(|i| 2.0 * (x[i] - (0..n).map(|a| jet.u(a) * jet.du(a, i)).sum::<f64>()))
        .collect();
    let mut hess = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            let mut s = if i == j { 1.0 } else { 0.0 };
            for a in 0..n {
                s -= jet.du(a, i) * jet.du(a, j) + jet.u(a) * jet.d2u(a, i, j);
            }
            hess[i * m + j] = 2.0 * s;
        }
    }
    ScalarJet { value, grad, hess }
}
