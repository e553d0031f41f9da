//! Lie sphere geometry of parametric surfaces.
//!
//! Surfaces are lifted to the lightcone of `R^{4,2}`, moved by Lie sphere
//! transformations and projected back to Euclidean space, where the
//! singularities of the resulting fronts are detected and classified.

pub mod classify;
pub mod curvature;
pub mod error;
pub mod jets;
pub mod legendre;
pub mod linalg;
pub mod locus;
pub mod minkowski;
pub mod models;
pub mod pipeline;
pub mod report;
pub mod sampling;
pub mod steering;
pub mod surface_dsl;
pub mod sweep;
pub mod transform;

pub use error::{Error, Result};
pub use jets::Jet2;
