//! Manifold estimation under perpendicular noise.
//!
//! `tubelab` generates observations `Y = ξ + Z` where `ξ` is uniform on a
//! compact manifold with known reach and `Z` is uniform on the normal fiber
//! of half-width `σ`, and provides:
//!
//! * [`geometry`]: point sets, Hausdorff distances (brute force and kd-tree),
//!   Monte Carlo volumes and raster distance-to-complement fields.
//! * [`manifold`]: spheres and the saucer/bump pair used in the two-point
//!   lower-bound construction, with exact projections, frames and nets.
//! * [`sampling`]: the observation model, local density estimates and density
//!   ratio diagnostics.
//! * [`lower_bound`]: numerical checks of the two-point construction, discrete
//!   affinity/Hellinger identities and log-log scaling fits.
//! * [`estimator`]: the union-of-balls support estimate and the level-set
//!   manifold estimate.
//! * [`experiment`]: config-driven rate and lower-bound experiments with CSV
//!   and SVG reports.

// Parameter checks are written `!(x > 0.0)` on purpose so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimator;
pub mod experiment;
pub mod geometry;
pub mod io;
pub mod lower_bound;
pub mod manifold;
pub mod rng;
pub mod sampling;

pub use error::{Error, Result};
pub use geometry::{BoundingBox, McEstimate, PointSet};
pub use manifold::{Frame, ManifoldModel, ModelKind, ModelSpec};
