//! Linear statics, load-stepped Newton iteration, linear buckling
//! eigenanalysis and the incremental-iterative thermal post-buckling
//! procedure.

mod eigen;
mod linear;
mod newton;
mod postbuckling;

pub use eigen::{
    smallest_positive_eigenpair, solve_linear_buckling, BucklingResult, EigenConfig, EigenPair,
};
pub use linear::solve_linear_static;
pub use newton::{convergence_order, solve_newton, NewtonConfig, NewtonSolution, NewtonStep};
pub use postbuckling::{
    solve_thermal_buckling, solve_thermal_postbuckling, PostBucklingConfig, PostBucklingPoint,
    PostBucklingTrace, ThermalBuckling, ThermalBucklingProblem,
};
