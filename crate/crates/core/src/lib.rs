//! Fractal dimensions of iterated-function-system attractors, computed three
//! independent ways:
//!
//! - the similarity dimension, root of the Moran equation `sum r_i^d = 1`
//!   ([`moran`]), exact when the open set condition holds ([`osc`]);
//! - the finite-scale crossover of grid-cover Hausdorff sums, where the map
//!   `delta -> N(eps) * diam^delta` crosses 1 ([`estimator`]);
//! - box-counting regression of `ln N(eps)` on `ln(1/eps)` ([`estimator`]).
//!
//! Attractors are sampled by [`ifs`]; [`catalog`] holds the classical
//! constructions (Cantor set, Koch curve, Sierpinski triangle, Hilbert
//! curves).

pub mod catalog;
pub mod error;
pub mod estimator;
pub mod geometry;
pub mod ifs;
pub mod io;
mod kdtree;
pub mod moran;
pub mod osc;

pub use error::{Error, Result};
pub use estimator::{
    box_dimension, cover_sum, crossover_dimension, grid_count, measure_profile, BoxDimension, DimensionFit, GridSpec,
    MeasureProfile, ScaleSeries,
};
pub use geometry::{hausdorff_distance, AffineMap, BoundingBox, Point, PointCloud};
pub use ifs::{chaos_game, deterministic_attractor, validate, AttractorSample, ContractionSystem, IfsSpec};
pub use moran::{moran_dimension, moran_value, ScaleList};
pub use osc::{check_osc, map_region, ConvexRegion, OscReport, Verdict};
