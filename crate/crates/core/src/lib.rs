//! Geometry engine, elliptic solver and diagnostics for spacelike graphic
//! translating solitons of mean curvature flow in pseudo-Euclidean space
//! `R^{m+n}_n`.
//!
//! * [`geometry`]: pointwise tensor kernel (frames, metric, connection,
//!   second fundamental form, curvature, pseudo-distance).
//! * [`expr`] and [`grid`]: graph-function providers with exact or
//!   finite-difference jets.
//! * [`solver`]: damped Newton for the translator system on a box with
//!   Dirichlet data.
//! * [`analysis`]: diagnostic suites over analytic fixtures and solver output.
//!
//! Per-node loops go through [`exec::Execution`]; with the `parallel` feature
//! (default) they run on rayon, otherwise sequentially.

pub mod ambient;
pub mod analysis;
pub mod error;
pub mod exec;
pub mod expr;
pub mod geometry;
pub mod grid;
pub mod jet;
pub mod richardson;
pub mod scalar;
pub mod solver;

pub use ambient::{causal_class, inner, AmbientVector, CausalClass, SpaceSignature, TranslatorSpec};
pub use error::{Error, Result};
pub use exec::Execution;
pub use expr::Expression;
pub use grid::{GridField, GridSpec};
pub use jet::{Jet2, ScalarJet};
