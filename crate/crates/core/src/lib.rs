//! Exact Euclidean shortest paths among polygonal obstacles.
//!
//! The free space is triangulated ([`triangulate`]), split into junctions and
//! corridors ([`corridors`]), and a continuous-Dijkstra wavefront confined to
//! the useful part of that decomposition settles the distance to `t`
//! ([`engine`]). [`oracle`] is an independent visibility-graph solver.

pub mod corridors;
pub mod domain;
pub mod engine;
pub mod error;
pub mod geom;
pub mod hull_trees;
pub mod oracle;
pub mod render;
pub mod triangulate;

pub use domain::{parse_instance, random_instance, Instance, PathResult};
pub use engine::{run, run_with, EngineOptions, RewindMode};
pub use error::{Error, Result};
pub use oracle::oracle_distance;
