//! Numerical toolkit for Pick functions: holomorphic self-maps of the upper
//! half-plane, their Herglotz–Nevanlinna measures and how those measures move
//! under Möbius transformations.

pub mod cayley;
pub mod error;
pub mod evaluation;
pub mod inversion;
pub mod moebius;
pub mod poly;
pub mod positivity;
pub mod quadrature;
pub mod rational;
pub mod representation;
pub mod transform;

pub use error::{Error, Result};
pub use representation::{
    Atom, BoundaryMeasure, DensitySpec, ExtendedReal, HerglotzFunction, DEFAULT_TOL,
};
