use serde::Serialize;

use super::{DiagnosticOptions, Surface};
use crate::ambient::TranslatorSpec;
use crate::error::{Error, Result};
use crate::geometry::{metric_lambda_min, PointGeometry};

/// Geometry and translator residual at one node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointRecord {
    pub index: Vec<usize>,
    pub x: Vec<f64>,
    /// Row-major induced metric.
    pub g: Vec<f64>,
    pub det_g: f64,
    pub lambda_min: f64,
    pub h_norm2: f64,
    pub b_norm2: f64,
    pub schwarz_margin: f64,
    pub residual: Vec<f64>,
}

/// Evaluate every node with a jet. Fails with the least spacelike node if
/// any has `lambda_min(g) <= delta_space`.
pub fn pointwise(surface: &Surface, t: &TranslatorSpec, opts: &DiagnosticOptions) -> Result<Vec<PointRecord>> {
    let spec = surface.grid();
    let nodes = surface.evaluable_nodes();
    let jets = opts.exec.try_map(nodes.len(), |q| surface.jet(nodes[q]))?;
    let (worst, lambda) = jets
        .iter()
        .enumerate()
        .filter_map(|(q, j)| j.as_ref().map(|j| (q, metric_lambda_min(j))))
        .fold((0, f64::INFINITY), |acc, (q, l)| if l < acc.1 { (q, l) } else { acc });
    if !(lambda > opts.delta_space) {
        return Err(Error::NotSpacelike {
            lambda_min: lambda,
            location: spec.coord(&spec.multi(nodes[worst])),
        });
    }
    let records = opts.exec.try_map(nodes.len(), |q| -> Result<Option<PointRecord>> {
        let Some(jet) = &jets[q] else {
            return Ok(None);
        };
        let geom = PointGeometry::new(jet, opts.delta_space)?;
        let idx = spec.multi(nodes[q]);
        Ok(Some(PointRecord {
            x: spec.coord(&idx),
            index: idx,
            g: geom.metric.g.clone(),
            det_g: geom.metric.det_g,
            lambda_min: geom.metric.lambda_min,
            h_norm2: geom.extrinsic.h_norm2,
            b_norm2: geom.extrinsic.b_norm2,
            schwarz_margin: geom.extrinsic.schwarz_margin(),
            residual: geom.translator_residual(t)?,
        }))
    })?;
    Ok(records.into_iter().flatten().collect())
}
