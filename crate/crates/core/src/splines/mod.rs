//! B-spline and NURBS machinery: knot vectors, basis evaluation with
//! derivatives up to second order, rational tensor-product surfaces and
//! geometry-preserving knot refinement.

mod basis;
mod knots;
mod refine;
pub mod shapes;
mod surface;

pub use basis::{eval_bspline_basis, BasisEvaluation};
pub use knots::KnotVector;
pub use refine::refine_knots;
pub use surface::{NurbsSurface, PhysicalBasis};
