//! Multi-scale organization of point clouds sampled from stratified spaces.
//!
//! The pipeline: build an adaptive cover tree whose leaves are clusters of
//! geometrically uniform points, connect the leaves into a scaffolding graph,
//! label each node with an estimated local dimension, then collapse the
//! scaffolding into a small spine graph that summarizes how the strata fit
//! together. Optional persistent-homology decoration attaches Betti vectors
//! to spine vertices.

pub mod audiofeat;
pub mod covertree;
pub mod dimension;
pub mod error;
pub mod geometry;
pub mod graphs;
pub mod homology;
pub mod io;
pub mod mlpca;
pub mod pipeline;
pub mod scaffolding;
pub mod spine;
pub mod synth;

pub use error::{Error, Result};
pub use geometry::PointCloud;
