use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::grid::GridField;

/// `u^a(x) = offset[a] + slopes[a] . x`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinePlane {
    pub offset: Vec<f64>,
    pub slopes: Vec<Vec<f64>>,
}

impl AffinePlane {
    /// Least-squares fit of `values[a][k]` sampled at `points[k]`.
    pub fn fit(points: &[Vec<f64>], values: &[Vec<f64>]) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::InvalidInput("affine fit needs sample points".into()));
        };
        let m = first.len();
        if points.len() < m + 1 {
            return Err(Error::InvalidInput(format!("affine fit in {m} variables needs at least {} points", m + 1)));
        }
        let count = points.len() as f64;
        let centre: Vec<f64> = (0..m).map(|i| points.iter().map(|p| p[i]).sum::<f64>() / count).collect();
        let design = DMatrix::from_fn(points.len(), m + 1, |k, c| if c == 0 { 1.0 } else { points[k][c - 1] - centre[c - 1] });
        let svd = design.svd(true, true);
        let mut offset = Vec::with_capacity(values.len());
        let mut slopes = Vec::with_capacity(values.len());
        for v in values {
            if v.len() != points.len() {
                return Err(Error::DimensionMismatch {
                    what: "affine fit samples",
                    expected: points.len(),
                    got: v.len(),
                });
            }
            let coef = svd
                .solve(&DVector::from_column_slice(v), 1e-14)
                .map_err(|e| Error::LinearSolve(format!("affine fit: {e}")))?;
            let s: Vec<f64> = (0..m).map(|i| coef[i + 1]).collect();
            let shift: f64 = s.iter().zip(&centre).map(|(a, b)| a * b).sum();
            offset.push(coef[0] - shift);
            slopes.push(s);
        }
        Ok(AffinePlane { offset, slopes })
    }

    /// Fit over the listed flat nodes of a field.
    pub fn fit_field(field: &GridField, nodes: &[usize]) -> Result<Self> {
        let spec = field.spec();
        let points: Vec<Vec<f64>> = nodes.iter().map(|&k| spec.coord(&spec.multi(k))).collect();
        let values: Vec<Vec<f64>> = (0..field.n())
            .map(|a| nodes.iter().map(|&k| field.at(a, k)).collect())
            .collect();
        AffinePlane::fit(&points, &values)
    }

    /// Fit over every node of a field.
    pub fn fit_all(field: &GridField) -> Result<Self> {
        let nodes: Vec<usize> = (0..field.spec().len()).collect();
        AffinePlane::fit_field(field, &nodes)
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.offset
            .iter()
            .zip(&self.slopes)
            .map(|(c, s)| c + s.iter().zip(x).map(|(a, b)| a * b).sum::<f64>())
            .collect()
    }

    /// Sup-norm distance between the field and the plane over `nodes`.
    pub fn deviation(&self, field: &GridField, nodes: &[usize]) -> f64 {
        let spec = field.spec();
        nodes
            .iter()
            .flat_map(|&k| {
                let p = self.eval(&spec.coord(&spec.multi(k)));
                (0..field.n()).map(move |a| (field.at(a, k) - p[a]).abs())
            })
            .fold(0.0, f64::max)
    }
}
