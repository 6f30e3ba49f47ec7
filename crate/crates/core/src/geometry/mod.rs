//! Pointwise pseudo-Riemannian geometry of spacelike graphs
//! `x -> (x, u^1(x), ..., u^n(x))` in `R^{m+n}_n`.
//!
//! Every quantity is a pure function of a [`Jet2`](crate::jet::Jet2); nothing
//! here holds state, so evaluation over many points can run concurrently.

mod curvature;
mod extrinsic;
mod metric;
mod pseudo_distance;

pub use curvature::{curvature, curvature_in_frame, curvature_with, CurvatureData};
pub use extrinsic::{
    graph_unit_normals, orthonormal_normal_frame, second_fundamental_form, second_fundamental_form_with,
    tangent_frame, tangential_normal_split, translator_residual, ExtrinsicData, PointGeometry,
};
pub use metric::{induced_metric, induced_metric_with, laplace_beltrami, metric_lambda_min, MetricData};
pub use pseudo_distance::{
    position, pseudo_distance, pseudo_distance_at, pseudo_distance_coordinate_jet, PseudoDistance,
};

pub(crate) use extrinsic::{norm_squares, translator_residual_metric};
pub(crate) use metric::{invert_spd, metric_tensor, min_eigenvalue};

/// Default threshold on `lambda_min(g)` for a point to count as spacelike.
pub const DEFAULT_DELTA_SPACE: f64 = 1e-9;
