//! Isogeometric analysis of functionally graded plates in thermal
//! environments.
//!
//! A third-order shear deformation plate model is discretized with NURBS
//! basis functions. The crate covers linear and von Kármán nonlinear
//! bending under pressure and temperature, linear thermal buckling, and
//! thermal post-buckling paths traced by an iterative nonlinear eigenvalue
//! procedure with temperature-dependent material properties.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop, clippy::too_many_arguments)]

pub mod case;
pub mod discretization;
pub mod error;
pub mod linalg;
pub mod materials;
pub mod quadrature;
pub mod solvers;
pub mod splines;
pub mod thermal;

pub use case::{run_case, Analysis, CaseResult, CaseSpec, Geometry};
pub use discretization::{build_mesh, BoundaryCondition, ConstraintSet, Mesh, PlateSystem};
pub use error::{Error, Result};
pub use materials::{lookup, DenominatorConvention, FgmSection, Phase};
pub use solvers::{
    solve_linear_buckling, solve_linear_static, solve_newton, solve_thermal_buckling,
    solve_thermal_postbuckling, BucklingResult, NewtonConfig, PostBucklingConfig,
    PostBucklingTrace, ThermalBucklingProblem,
};
pub use splines::NurbsSurface;
pub use thermal::{
    PropertyTemperature, SeriesTruncation, TemperatureProfile, TemperatureScale, ThermalField,
};
