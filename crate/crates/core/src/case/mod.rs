//! Declarative analysis cases: a JSON schema for geometry, materials,
//! loads and solver settings, and a runner producing normalized results.

mod run;
mod spec;

pub use run::{
    run_case, BucklingSummary, CaseResult, CurveRow, MeshSummary, StaticSummary, Summary,
};
pub use spec::{
    Analysis, CaseSpec, Geometry, Loads, MaterialRef, MaterialSpec, MeshSpec, OutputSpec,
    SolverSpec, PRESETS,
};
