//! Coupled potential-flow / linear-elasticity evaluation of planar component
//! shapes, with multi-criteria (Pareto) and scalarization tooling on top.
//!
//! The pipeline for one design is
//! `realize_shape -> mesh_fluid -> solve_flow -> static_pressure ->
//! traction_from_pressure -> mesh_solid -> solve_elasticity -> objectives`.
//! Everything here is two-dimensional: shapes are planar curves, the solid is
//! modelled in plane strain.

pub mod config;
pub mod coupled;
pub mod elasticity;
pub mod fem;
pub mod flow;
pub mod geometry;
pub mod mesh;
pub mod multicrit;
pub mod objectives;
pub mod pipeline;
pub mod scalarization;
mod tag;

pub use tag::BoundaryTag;

/// Planar vector type used for coordinates, normals and displacements.
pub type Vec2 = nalgebra::Vector2<f64>;

/// Spatial dimension of every field and mesh produced by this crate.
pub const DIMENSION: usize = 2;
