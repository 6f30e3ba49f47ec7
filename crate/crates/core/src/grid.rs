//! Tensor-product grids over an axis-aligned box and sampled graph fields
//! with second-order central-difference jets.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::expr::Expression;
use crate::jet::Jet2;

/// Minimum nodes per axis for a sampled field.
pub const MIN_NODES_PER_AXIS: usize = 5;

/// Reach of the central-difference stencil in cells.
pub const STENCIL_REACH: usize = 1;

/// Box `[lo_i, hi_i]` sampled at `shape[i]` equispaced nodes per axis.
/// Nodes are numbered row-major with the last axis fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub shape: Vec<usize>,
}

impl GridSpec {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, shape: Vec<usize>) -> Result<Self> {
        let m = lo.len();
        if m == 0 || hi.len() != m || shape.len() != m {
            return Err(Error::InvalidInput(format!(
                "grid dimensions disagree: lo {}, hi {}, shape {}",
                lo.len(),
                hi.len(),
                shape.len()
            )));
        }
        for i in 0..m {
            if !(lo[i].is_finite() && hi[i].is_finite() && hi[i] > lo[i]) {
                return Err(Error::InvalidInput(format!("empty or non-finite extent on axis {}", i + 1)));
            }
            if shape[i] < MIN_NODES_PER_AXIS {
                return Err(Error::InvalidInput(format!(
                    "axis {} has {} nodes, need at least {MIN_NODES_PER_AXIS}",
                    i + 1,
                    shape[i]
                )));
            }
        }
        Ok(GridSpec { lo, hi, shape })
    }

    /// Cube `[-r, r]^m` with spacing `h` (rounded to the nearest node count).
    pub fn centered(m: usize, radius: f64, h: f64) -> Result<Self> {
        let cells = (2.0 * radius / h).round() as usize;
        GridSpec::new(vec![-radius; m], vec![radius; m], vec![cells + 1; m])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        (self.hi[axis] - self.lo[axis]) / (self.shape[axis] - 1) as f64
    }

    pub fn spacings(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.spacing(i)).collect()
    }

    /// Largest spacing over the axes.
    pub fn h(&self) -> f64 {
        self.spacings().into_iter().fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn strides(&self) -> Vec<usize> {
        let m = self.dim();
        let mut s = vec![1; m];
        for i in (0..m.saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.shape[i + 1];
        }
        s
    }

    pub fn flat(&self, index: &[usize]) -> usize {
        index.iter().zip(self.strides()).map(|(i, s)| i * s).sum()
    }

    pub fn multi(&self, mut flat: usize) -> Vec<usize> {
        let strides = self.strides();
        strides
            .iter()
            .map(|s| {
                let i = flat / s;
                flat %= s;
                i
            })
            .collect()
    }

    pub fn coord(&self, index: &[usize]) -> Vec<f64> {
        index
            .iter()
            .enumerate()
            .map(|(a, &i)| {
                if i + 1 == self.shape[a] {
                    self.hi[a]
                } else {
                    self.lo[a] + i as f64 * self.spacing(a)
                }
            })
            .collect()
    }

    /// Cells between the node and the nearest face of the box.
    pub fn boundary_distance(&self, index: &[usize]) -> usize {
        index
            .iter()
            .zip(&self.shape)
            .map(|(&i, &n)| i.min(n - 1 - i))
            .min()
            .unwrap_or(0)
    }

    pub fn is_boundary(&self, index: &[usize]) -> bool {
        self.boundary_distance(index) == 0
    }

    /// Flat indices of nodes at least `margin` cells from the boundary.
    pub fn nodes_with_margin(&self, margin: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&k| self.boundary_distance(&self.multi(k)) >= margin)
            .collect()
    }

    /// Grid of every other node, when every axis has an odd node count.
    pub fn coarsened(&self) -> Option<GridSpec> {
        if self.shape.iter().all(|n| n % 2 == 1 && (n - 1) / 2 + 1 >= MIN_NODES_PER_AXIS) {
            Some(GridSpec {
                lo: self.lo.clone(),
                hi: self.hi.clone(),
                shape: self.shape.iter().map(|n| (n - 1) / 2 + 1).collect(),
            })
        } else {
            None
        }
    }

    /// Grid with every cell halved.
    pub fn refined(&self) -> GridSpec {
        GridSpec {
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            shape: self.shape.iter().map(|n| 2 * (n - 1) + 1).collect(),
        }
    }

    /// Index of the node nearest to `x`, if `x` lies in the box.
    pub fn nearest(&self, x: &[f64]) -> Option<Vec<usize>> {
        (0..self.dim())
            .map(|a| {
                let t = (x[a] - self.lo[a]) / self.spacing(a);
                let i = t.round();
                if i < 0.0 || i > (self.shape[a] - 1) as f64 {
                    None
                } else {
                    Some(i as usize)
                }
            })
            .collect()
    }
}

/// `n` scalar samples per node of a [`GridSpec`]; read-only after
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    spec: GridSpec,
    n: usize,
    /// `samples[a][node]`.
    samples: Vec<Vec<f64>>,
}

impl GridField {
    pub fn new(spec: GridSpec, samples: Vec<Vec<f64>>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidInput("grid field needs at least one component".into()));
        }
        for s in &samples {
            if s.len() != spec.len() {
                return Err(Error::DimensionMismatch {
                    what: "grid samples",
                    expected: spec.len(),
                    got: s.len(),
                });
            }
            if s.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput("grid samples must be finite".into()));
            }
        }
        Ok(GridField {
            n: samples.len(),
            spec,
            samples,
        })
    }

    /// Sample expressions at every node.
    pub fn from_expressions(spec: GridSpec, exprs: &[Expression], exec: Execution) -> Result<Self> {
        let per_node = exec.try_map(spec.len(), |k| {
            let x = spec.coord(&spec.multi(k));
            exprs.iter().map(|e| e.eval(&x)).collect::<Result<Vec<f64>>>()
        })?;
        let samples = (0..exprs.len())
            .map(|a| per_node.iter().map(|v| v[a]).collect())
            .collect();
        GridField::new(spec, samples)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn component(&self, a: usize) -> &[f64] {
        &self.samples[a]
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Vec<f64>> {
        self.samples
    }

    #[inline]
    pub fn at(&self, a: usize, flat: usize) -> f64 {
        self.samples[a][flat]
    }

    /// Central-difference jet at a node at least one cell inside the box.
    pub fn fd_jet(&self, index: &[usize]) -> Result<Jet2> {
        let spec = &self.spec;
        let m = spec.dim();
        if index.len() != m {
            return Err(Error::DimensionMismatch {
                what: "grid index",
                expected: m,
                got: index.len(),
            });
        }
        if index.iter().zip(&spec.shape).any(|(i, n)| i >= n) {
            return Err(Error::InvalidInput(format!("grid index {index:?} out of range")));
        }
        if spec.boundary_distance(index) < STENCIL_REACH {
            return Err(Error::BoundaryProximity {
                index: index.to_vec(),
                reach: STENCIL_REACH,
            });
        }
        let strides = spec.strides();
        let h = spec.spacings();
        let c = spec.flat(index);
        let n = self.n;
        let mut value = Vec::with_capacity(n);
        let mut grad = Vec::with_capacity(n * m);
        let mut hess = vec![0.0; n * m * m];
        for a in 0..n {
            let u = &self.samples[a];
            value.push(u[c]);
            for i in 0..m {
                let (p, q) = (c + strides[i], c - strides[i]);
                grad.push((u[p] - u[q]) / (2.0 * h[i]));
                hess[(a * m + i) * m + i] = (u[p] - 2.0 * u[c] + u[q]) / (h[i] * h[i]);
                for j in 0..i {
                    let (sj, si) = (strides[j], strides[i]);
                    let mixed =
                        (u[c + si + sj] - u[c + si - sj] - u[c - si + sj] + u[c - si - sj]) / (4.0 * h[i] * h[j]);
                    hess[(a * m + i) * m + j] = mixed;
                    hess[(a * m + j) * m + i] = mixed;
                }
            }
        }
        Jet2::new(spec.coord(index), value, grad, hess)
    }

    /// Every other node; requires odd node counts.
    pub fn coarsened(&self) -> Option<GridField> {
        let coarse = self.spec.coarsened()?;
        let samples = self
            .samples
            .iter()
            .map(|u| {
                (0..coarse.len())
                    .map(|k| {
                        let fine: Vec<usize> = coarse.multi(k).iter().map(|i| 2 * i).collect();
                        u[self.spec.flat(&fine)]
                    })
                    .collect()
            })
            .collect();
        Some(GridField {
            spec: coarse,
            n: self.n,
            samples,
        })
    }

    /// Multilinear interpolation of every component at `x` (clamped to the box).
    pub fn interpolate(&self, x: &[f64]) -> Vec<f64> {
        let spec = &self.spec;
        let m = spec.dim();
        let mut base = Vec::with_capacity(m);
        let mut frac = Vec::with_capacity(m);
        for a in 0..m {
            let t = ((x[a] - spec.lo[a]) / spec.spacing(a)).clamp(0.0, (spec.shape[a] - 1) as f64);
            let i = (t.floor() as usize).min(spec.shape[a] - 2);
            base.push(i);
            frac.push(t - i as f64);
        }
        (0..self.n)
            .map(|comp| {
                let mut acc = 0.0;
                for corner in 0..(1usize << m) {
                    let mut w = 1.0;
                    let mut idx = base.clone();
                    for a in 0..m {
                        if corner >> a & 1 == 1 {
                            idx[a] += 1;
                            w *= frac[a];
                        } else {
                            w *= 1.0 - frac[a];
                        }
                    }
                    if w != 0.0 {
                        acc += w * self.samples[comp][spec.flat(&idx)];
                    }
                }
                acc
            })
            .collect()
    }

    /// CSV with header `i1..im,u1..un`, one row per node, values printed with
    /// 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let m = self.spec.dim();
        let header: Vec<String> = (1..=m)
            .map(|i| format!("i{i}"))
            .chain((1..=self.n).map(|a| format!("u{a}")))
            .collect();
        writeln!(w, "{}", header.join(","))?;
        for k in 0..self.spec.len() {
            let idx = self.spec.multi(k);
            let mut row: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
            row.extend(self.samples.iter().map(|u| format_f64(u[k])));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// Inverse of [`write_csv`](Self::write_csv); every node must appear once.
    pub fn read_csv<R: BufRead>(spec: GridSpec, n: usize, r: R) -> Result<Self> {
        let m = spec.dim();
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidInput("empty grid csv".into()))??;
        let cols = header.split(',').count();
        if cols != m + n {
            return Err(Error::DimensionMismatch {
                what: "grid csv columns",
                expected: m + n,
                got: cols,
            });
        }
        let mut samples = vec![vec![f64::NAN; spec.len()]; n];
        let mut seen = vec![false; spec.len()];
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let bad = |msg: &str| Error::InvalidInput(format!("grid csv row {}: {msg}", lineno + 2));
            if fields.len() != m + n {
                return Err(bad("wrong number of fields"));
            }
            let idx: Vec<usize> = fields[..m]
                .iter()
                .map(|f| f.parse::<usize>().map_err(|_| bad("bad node index")))
                .collect::<Result<_>>()?;
            if idx.iter().zip(&spec.shape).any(|(i, s)| i >= s) {
                return Err(bad("node index out of range"));
            }
            let k = spec.flat(&idx);
            if seen[k] {
                return Err(bad("duplicate node"));
            }
            seen[k] = true;
            for a in 0..n {
                samples[a][k] = fields[m + a].parse().map_err(|_| bad("bad value"))?;
            }
        }
        if let Some(k) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidInput(format!("grid csv misses node {:?}", spec.multi(k))));
        }
        GridField::new(spec, samples)
    }
}

/// Scientific notation with 17 significant digits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::analytic_jet;

    fn spec(h: f64) -> GridSpec {
        GridSpec::centered(2, 1.0, h).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(GridSpec::new(vec![0.0], vec![1.0], vec![4]).is_err());
        assert!(GridSpec::new(vec![0.0], vec![0.0], vec![5]).is_err());
        assert!(GridSpec::new(vec![0.0, 0.0], vec![1.0], vec![5, 5]).is_err());
        let s = spec(0.25);
        assert_eq!(s.shape, vec![9, 9]);
        assert_eq!(s.multi(s.flat(&[3, 7])), vec![3, 7]);
        assert_eq!(s.coord(&[8, 0]), vec![1.0, -1.0]);
        assert_eq!(s.nodes_with_margin(1).len(), 49);
    }

    #[test]
    fn affine_and_quadratic_fields_are_exact() {
        let s = spec(0.125);
        let affine = Expression::parse_list("0.5*x1; 0.3*x2", 2).unwrap();
        let field = GridField::from_expressions(s.clone(), &affine, Execution::Sequential).unwrap();
        for idx in [[1, 1], [4, 9], [15, 15]] {
            let fd = field.fd_jet(&idx).unwrap();
            let exact = analytic_jet(&affine, &s.coord(&idx)).unwrap();
            for a in 0..2 {
                for i in 0..2 {
                    assert!((fd.du(a, i) - exact.du(a, i)).abs() < 1e-12);
                    for j in 0..2 {
                        assert!(fd.d2u(a, i, j).abs() < 1e-12);
                    }
                }
            }
        }
        let quad = Expression::parse_list("x1^2 - 3*x1*x2", 2).unwrap();
        let field = GridField::from_expressions(s, &quad, Execution::Sequential).unwrap();
        let fd = field.fd_jet(&[5, 6]).unwrap();
        assert!((fd.d2u(0, 0, 0) - 2.0).abs() < 1e-12);
        assert!((fd.d2u(0, 0, 1) + 3.0).abs() < 1e-12);
        assert!(fd.d2u(0, 1, 1).abs() < 1e-12);
    }

    #[test]
    fn boundary_proximity_is_an_error() {
        let field = GridField::from_expressions(
            spec(0.25),
            &Expression::parse_list("x1", 2).unwrap(),
            Execution::Sequential,
        )
        .unwrap();
        assert!(matches!(field.fd_jet(&[0, 4]), Err(Error::BoundaryProximity { .. })));
        assert!(matches!(field.fd_jet(&[4, 8]), Err(Error::BoundaryProximity { .. })));
        assert!(field.fd_jet(&[1, 7]).is_ok());
    }

    #[test]
    fn closed_form_second_derivative_converges() {
        let u = Expression::parse_list("ln(1+exp(2*x1))-x1", 2).unwrap();
        let err = |h: f64| {
            let s = GridSpec::centered(2, 0.5, h).unwrap();
            let field = GridField::from_expressions(s.clone(), &u, Execution::Sequential).unwrap();
            let mid = s.nearest(&[0.0, 0.0]).unwrap();
            (field.fd_jet(&mid).unwrap().d2u(0, 0, 0) - 1.0).abs()
        };
        let (e1, e2) = (err(0.02), err(0.01));
        assert!(e1 < 1e-3);
        assert!(crate::richardson::observed_order(e1, e2) > 1.9);
    }

    #[test]
    fn csv_round_trip() {
        let s = GridSpec::new(vec![0.0, -1.0], vec![1.0, 1.0], vec![5, 6]).unwrap();
        let field = GridField::from_expressions(
            s.clone(),
            &Expression::parse_list("x1*x2 + 1/3; exp(x1)", 2).unwrap(),
            Execution::Sequential,
        )
        .unwrap();
        let mut buf = Vec::new();
        field.write_csv(&mut buf).unwrap();
        let back = GridField::read_csv(s, 2, buf.as_slice()).unwrap();
        assert_eq!(back, field);
    }

    #[test]
    fn coarsen_and_interpolate() {
        let s = spec(0.125);
        let field = GridField::from_expressions(
            s,
            &Expression::parse_list("2*x1 - x2 + 0.5", 2).unwrap(),
            Execution::Sequential,
        )
        .unwrap();
        let c = field.coarsened().unwrap();
        assert_eq!(c.spec().shape, vec![9, 9]);
        let v = field.interpolate(&[0.3, -0.71]);
        assert!((v[0] - (0.6 + 0.71 + 0.5)).abs() < 1e-12);
    }
}
