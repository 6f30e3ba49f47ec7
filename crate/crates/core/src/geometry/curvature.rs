use serde::Serialize;

use super::extrinsic::PointGeometry;
use crate::ambient::{inner_unchecked, AmbientVector};
use crate::error::Result;
use crate::jet::Jet2;

/// Riemann tensor `R_ijkl` (flat, row-major in `i,j,k,l`) and Ricci `R_ij`
/// in coordinate components, with `R_1212 = K det g`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureData {
    pub m: usize,
    pub riemann: Vec<f64>,
    pub ricci: Vec<f64>,
}

impl CurvatureData {
    #[inline]
    pub fn r(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let m = self.m;
        self.riemann[((i * m + j) * m + k) * m + l]
    }

    #[inline]
    pub fn ric(&self, i: usize, j: usize) -> f64 {
        self.ricci[i * self.m + j]
    }

    /// Largest violation of the algebraic symmetries of `R_ijkl` and `R_ij`.
    pub fn symmetry_defect(&self) -> f64 {
        let m = self.m;
        let mut worst = 0.0_f64;
        for i in 0..m {
            for j in 0..m {
                worst = worst.max((self.ric(i, j) - self.ric(j, i)).abs());
                for k in 0..m {
                    for l in 0..m {
                        let r = self.r(i, j, k, l);
                        worst = worst
                            .max((r + self.r(j, i, k, l)).abs())
                            .max((r + self.r(i, j, l, k)).abs())
                            .max((r - self.r(k, l, i, j)).abs());
                    }
                }
            }
        }
        worst
    }
}

/// Gauss equation `R_ijkl = -sum_a (h^a_ik h^a_jl - h^a_il h^a_jk)` with
/// `h^a_ij = <B_ij, f_a>` against an orthonormal normal frame `f_a`.
pub fn curvature_in_frame(geom: &PointGeometry, frame: &[AmbientVector]) -> CurvatureData {
    let m = geom.jet.m();
    let ex = &geom.extrinsic;
    let h: Vec<Vec<f64>> = frame
        .iter()
        .map(|f| ex.b.iter().map(|bij| inner_unchecked(&bij.0, &f.0, m)).collect())
        .collect();
    let mut riemann = vec![0.0; m * m * m * m];
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    let mut s = 0.0;
                    for ha in &h {
                        s += ha[i * m + k] * ha[j * m + l] - ha[i * m + l] * ha[j * m + k];
                    }
                    riemann[((i * m + j) * m + k) * m + l] = -s;
                }
            }
        }
    }
    // R_ij = g^kl R_kilj, the coordinate form of the orthonormal-frame trace
    let mut ricci = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            let mut s = 0.0;
            for k in 0..m {
                for l in 0..m {
                    s += geom.metric.g_inv(k, l) * riemann[((k * m + i) * m + l) * m + j];
                }
            }
            ricci[i * m + j] = s;
        }
    }
    CurvatureData { m, riemann, ricci }
}

pub fn curvature_with(jet: &Jet2, delta_space: f64) -> Result<CurvatureData> {
    let geom = PointGeometry::new(jet, delta_space)?;
    Ok(curvature_in_frame(&geom, &geom.extrinsic.normal_frame))
}

pub fn curvature(jet: &Jet2) -> Result<CurvatureData> {
    curvature_with(jet, super::DEFAULT_DELTA_SPACE)
}
