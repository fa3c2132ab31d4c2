//! Neumann eigenvalue bounds for triangles: exact equilateral modes, affine
//! transplantation trial functions, a P1 finite element solver and
//! certificates for the polynomial reductions.

pub mod certificates;
pub mod cli;
pub mod constants;
pub mod equilateral;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod quadrature;
pub mod scanner;
pub mod transplant;
pub mod trial_bounds;

pub use error::{Error, Result};
pub use geometry::{ShapeParams, Triangle};
