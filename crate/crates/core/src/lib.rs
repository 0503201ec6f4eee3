//! Generalized harmonic maps (sigma models whose target metric depends on
//! the base coordinates) and their use for two-Killing-vector vacuum
//! gravity: stationary axisymmetric fields, Einstein–Rosen waves and Gowdy
//! cosmologies.

pub mod engine;
pub mod error;
pub mod grid;
pub mod io;
pub mod linalg;
pub mod map;
pub mod metric;
pub mod models;
pub mod parallel;
pub mod solvers;
pub mod special;
pub mod verify;

pub use engine::{
    action, conservation_residual, el_residual, emt, induced_metric, lagrangian_density,
    linearity_residual, EmtField, Tensor2Field,
};
pub use error::{Error, ErrorKind, Result};
pub use grid::{GridSpec, Patch, Region, ScalarJet};
pub use map::FieldMap;
pub use metric::{christoffel, weyl_rescale, BaseMetric, Christoffel, TargetMetric};
pub use parallel::{set_threads, threads};
