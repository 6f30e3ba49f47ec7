//! The ambient pseudo-Euclidean space `R^{m+n}_n` and constant vectors in it.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Default threshold on `|<T,T>|` below which a vector counts as lightlike.
pub const DEFAULT_DELTA_LIGHT: f64 = 1e-9;

/// Signature `(m, n)`: `m` positive (graph) directions followed by `n`
/// negative (normal) directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceSignature {
    pub m: usize,
    pub n: usize,
}

impl SpaceSignature {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidInput(format!(
                "signature needs m >= 1 and n >= 1, got ({m}, {n})"
            )));
        }
        Ok(SpaceSignature { m, n })
    }

    pub fn dim(&self) -> usize {
        self.m + self.n
    }

    /// Sign of the `k`-th diagonal entry of the ambient metric.
    #[inline]
    pub fn sign(&self, k: usize) -> f64 {
        if k < self.m {
            1.0
        } else {
            -1.0
        }
    }
}

/// A point or vector of `R^{m+n}`; the signature is supplied when pairing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmbientVector(pub Vec<f64>);

impl AmbientVector {
    pub fn new(components: Vec<f64>) -> Self {
        AmbientVector(components)
    }

    pub fn zeros(dim: usize) -> Self {
        AmbientVector(vec![0.0; dim])
    }

    /// Canonical basis vector `E_k` (zero-based).
    pub fn basis(k: usize, dim: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[k] = 1.0;
        AmbientVector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| *c == 0.0)
    }

    pub fn sup_norm(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |acc, c| acc.max(c.abs()))
    }

    pub fn add(&self, other: &AmbientVector) -> AmbientVector {
        AmbientVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &AmbientVector) -> AmbientVector {
        AmbientVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scaled(&self, c: f64) -> AmbientVector {
        AmbientVector(self.0.iter().map(|a| a * c).collect())
    }
}

/// Signature inner product `sum_{i<m} v_i w_i - sum_{k>=m} v_k w_k`.
pub fn inner(v: &AmbientVector, w: &AmbientVector, sig: SpaceSignature) -> Result<f64> {
    for u in [v, w] {
        if u.len() != sig.dim() {
            return Err(Error::DimensionMismatch {
                what: "ambient vector",
                expected: sig.dim(),
                got: u.len(),
            });
        }
    }
    Ok(inner_unchecked(&v.0, &w.0, sig.m))
}

#[inline]
pub(crate) fn inner_unchecked(v: &[f64], w: &[f64], m: usize) -> f64 {
    let (spatial, normal) = (v[..m].iter().zip(&w[..m]), v[m..].iter().zip(&w[m..]));
    spatial.map(|(a, b)| a * b).sum::<f64>() - normal.map(|(a, b)| a * b).sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CausalClass {
    Spacelike,
    Lightlike,
    Timelike,
}

impl fmt::Display for CausalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CausalClass::Spacelike => "spacelike",
            CausalClass::Lightlike => "lightlike",
            CausalClass::Timelike => "timelike",
        };
        f.write_str(s)
    }
}

fn classify(c0: f64, delta_light: f64) -> CausalClass {
    if c0 > delta_light {
        CausalClass::Spacelike
    } else if c0.abs() <= delta_light {
        CausalClass::Lightlike
    } else {
        CausalClass::Timelike
    }
}

pub fn causal_class(v: &AmbientVector, sig: SpaceSignature, delta_light: f64) -> Result<CausalClass> {
    if v.is_zero() {
        return Err(Error::InvalidInput("causal class of the zero vector".into()));
    }
    Ok(classify(inner(v, v, sig)?, delta_light))
}

/// Translating vector `T = sum a^i E_i + sum b^alpha E_{m+alpha}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranslatorSpec {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// `<T,T> = |a|^2 - |b|^2`.
    pub c0: f64,
    pub causal_class: CausalClass,
}

impl TranslatorSpec {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(a, b, DEFAULT_DELTA_LIGHT)
    }

    pub fn with_tolerance(a: Vec<f64>, b: Vec<f64>, delta_light: f64) -> Result<Self> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::InvalidInput("translating vector needs m >= 1 and n >= 1 components".into()));
        }
        if a.iter().chain(&b).any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("translating vector has non-finite components".into()));
        }
        if a.iter().chain(&b).all(|c| *c == 0.0) {
            return Err(Error::InvalidInput("translating vector must be non-zero".into()));
        }
        let c0 = a.iter().map(|x| x * x).sum::<f64>() - b.iter().map(|x| x * x).sum::<f64>();
        Ok(TranslatorSpec {
            causal_class: classify(c0, delta_light),
            a,
            b,
            c0,
        })
    }

    /// Build from a full ambient vector of length `m + n`.
    pub fn from_ambient(t: &AmbientVector, sig: SpaceSignature) -> Result<Self> {
        if t.len() != sig.dim() {
            return Err(Error::DimensionMismatch {
                what: "translating vector",
                expected: sig.dim(),
                got: t.len(),
            });
        }
        Self::new(t.0[..sig.m].to_vec(), t.0[sig.m..].to_vec())
    }

    pub fn signature(&self) -> SpaceSignature {
        SpaceSignature {
            m: self.a.len(),
            n: self.b.len(),
        }
    }

    pub fn to_ambient(&self) -> AmbientVector {
        AmbientVector(self.a.iter().chain(&self.b).copied().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig22() -> SpaceSignature {
        SpaceSignature::new(2, 2).unwrap()
    }

    #[test]
    fn inner_products_on_basis_and_translating_vector() {
        let s = sig22();
        let e1 = AmbientVector::new(vec![1.0, 0.0, 0.0, 0.0]);
        let e3 = AmbientVector::new(vec![0.0, 0.0, 1.0, 0.0]);
        let t = AmbientVector::new(vec![0.0, 1.0, 1.0, 0.5]);
        assert_eq!(inner(&e1, &e1, s).unwrap(), 1.0);
        assert_eq!(inner(&e3, &e3, s).unwrap(), -1.0);
        assert_eq!(inner(&t, &t, s).unwrap(), -0.25);
    }

    #[test]
    fn inner_rejects_wrong_length() {
        let v = AmbientVector::new(vec![1.0, 0.0, 0.0]);
        assert!(matches!(
            inner(&v, &v, sig22()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn causal_classes() {
        let s = sig22();
        let cls = |v: Vec<f64>| causal_class(&AmbientVector::new(v), s, DEFAULT_DELTA_LIGHT).unwrap();
        assert_eq!(cls(vec![1.0, 0.0, 0.5, 0.0]), CausalClass::Spacelike);
        assert_eq!(cls(vec![0.0, 1.0, 1.0, 0.0]), CausalClass::Lightlike);
        assert_eq!(cls(vec![0.0, 1.0, 1.0, 0.5]), CausalClass::Timelike);
        assert!(causal_class(&AmbientVector::zeros(4), s, 1e-9).is_err());
    }

    #[test]
    fn translator_spec_rejects_zero() {
        assert!(TranslatorSpec::new(vec![0.0, 0.0], vec![0.0]).is_err());
        let t = TranslatorSpec::new(vec![1.0, 0.0], vec![0.5, 0.0]).unwrap();
        assert_eq!(t.c0, 0.75);
        assert_eq!(t.causal_class, CausalClass::Spacelike);
    }
}
