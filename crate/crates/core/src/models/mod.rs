//! Concrete bindings of the generic engine: stationary axisymmetric fields,
//! static Weyl series, Einstein–Rosen waves, Gowdy cosmologies, dimensional
//! extension and string boundary conditions.

pub mod axisym;
pub mod boundary;
pub mod er;
pub mod extension;
pub mod gowdy;
pub mod potential;
pub mod weyl;

pub use boundary::{boundary_classify, BoundaryClass, BoundaryReport};
pub use potential::{integrate_potential, Potential};
