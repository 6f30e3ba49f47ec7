use crate::ambient::SpaceSignature;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Tolerance on `|u_ij - u_ji|` accepted by [`Jet2::new`].
pub const HESS_SYMMETRY_TOL: f64 = 1e-10;

/// Value, gradient and Hessian of the `n` graph functions at one base point.
///
/// Storage is flat: `grad[a * m + i] = u^a_i`,
/// `hess[(a * m + i) * m + j] = u^a_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2<S = f64> {
    m: usize,
    n: usize,
    base: Vec<f64>,
    value: Vec<S>,
    grad: Vec<S>,
    hess: Vec<S>,
}

impl<S: Scalar> Jet2<S> {
    pub fn new(base: Vec<f64>, value: Vec<S>, grad: Vec<S>, hess: Vec<S>) -> Result<Self> {
        let m = base.len();
        let n = value.len();
        if m == 0 || n == 0 {
            return Err(Error::InvalidInput("jet needs m >= 1 and n >= 1".into()));
        }
        if grad.len() != n * m {
            return Err(Error::DimensionMismatch {
                what: "jet gradient",
                expected: n * m,
                got: grad.len(),
            });
        }
        if hess.len() != n * m * m {
            return Err(Error::DimensionMismatch {
                what: "jet hessian",
                expected: n * m * m,
                got: hess.len(),
            });
        }
        let jet = Jet2 {
            m,
            n,
            base,
            value,
            grad,
            hess,
        };
        for a in 0..n {
            for i in 0..m {
                for j in 0..i {
                    let (hij, hji) = (jet.d2u(a, i, j).value(), jet.d2u(a, j, i).value());
                    let scale = 1.0_f64.max(hij.abs()).max(hji.abs());
                    if (hij - hji).abs() > HESS_SYMMETRY_TOL * scale {
                        return Err(Error::InvalidInput(format!(
                            "hessian of u^{} not symmetric in ({i},{j}): {hij} vs {hji}",
                            a + 1
                        )));
                    }
                }
            }
        }
        Ok(jet)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn signature(&self) -> SpaceSignature {
        SpaceSignature {
            m: self.m,
            n: self.n,
        }
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    #[inline]
    pub fn u(&self, a: usize) -> &S {
        &self.value[a]
    }

    #[inline]
    pub fn du(&self, a: usize, i: usize) -> &S {
        &self.grad[a * self.m + i]
    }

    #[inline]
    pub fn d2u(&self, a: usize, i: usize, j: usize) -> &S {
        &self.hess[(a * self.m + i) * self.m + j]
    }

    pub fn values(&self) -> &[S] {
        &self.value
    }
}

impl Jet2<f64> {
    /// Plain `f64` view of a jet whose entries are higher-order numbers.
    pub fn from_values<S: Scalar>(jet: &Jet2<S>) -> Jet2<f64> {
        Jet2 {
            m: jet.m,
            n: jet.n,
            base: jet.base.clone(),
            value: jet.value.iter().map(Scalar::value).collect(),
            grad: jet.grad.iter().map(Scalar::value).collect(),
            hess: jet.hess.iter().map(Scalar::value).collect(),
        }
    }

    /// Jet of the affine map `u^a(x) = c^a + sum_i L^a_i x_i` (rows of `slopes`).
    pub fn affine(base: Vec<f64>, offsets: &[f64], slopes: &[Vec<f64>]) -> Result<Self> {
        let m = base.len();
        let value = offsets
            .iter()
            .zip(slopes)
            .map(|(c, l)| c + l.iter().zip(&base).map(|(li, xi)| li * xi).sum::<f64>())
            .collect::<Vec<_>>();
        let grad = slopes.iter().flatten().copied().collect();
        let n = offsets.len();
        Jet2::new(base, value, grad, vec![0.0; n * m * m])
    }
}

/// Coordinate jet of a scalar field on the parameter domain.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarJet {
    pub value: f64,
    pub grad: Vec<f64>,
    /// Row-major `m x m`.
    pub hess: Vec<f64>,
}

impl ScalarJet {
    pub fn constant(value: f64, m: usize) -> Self {
        ScalarJet {
            value,
            grad: vec![0.0; m],
            hess: vec![0.0; m * m],
        }
    }

    /// Collapse a [`Dual2`](crate::scalar::Dual2) over `f64` into its components.
    pub fn from_dual(d: &crate::scalar::Dual2<f64>, m: usize) -> Self {
        ScalarJet {
            value: d.val,
            grad: (0..m).map(|i| d.grad_at(i)).collect(),
            hess: (0..m * m).map(|k| d.hess_at(k / m, k % m)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_asymmetric_hessian() {
        let r = Jet2::new(vec![0.0, 0.0], vec![0.0], vec![0.0, 0.0], vec![0.0, 1.0, 0.5, 0.0]);
        assert!(matches!(r, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn rejects_bad_lengths() {
        let r = Jet2::new(vec![0.0, 0.0], vec![0.0], vec![0.0], vec![0.0; 4]);
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn affine_jet_layout() {
        let j = Jet2::affine(vec![1.0, 2.0], &[0.0, 1.0], &[vec![0.5, 0.0], vec![0.0, 0.3]]).unwrap();
        assert_eq!(*j.u(0), 0.5);
        assert!((*j.u(1) - 1.6).abs() < 1e-15);
        assert_eq!(*j.du(1, 1), 0.3);
        assert_eq!(*j.d2u(0, 1, 0), 0.0);
    }
}
