//! Discrete plate operators: mesh and Gauss data, degree-of-freedom
//! numbering, edge constraints, strain-displacement operators, global
//! assembly and post-solution field recovery.

mod constraints;
mod dofs;
mod mesh;
mod recover;
mod strain;
mod system;

pub use constraints::{BoundaryCondition, ConstraintSet, Reduction};
pub use dofs::{DofMap, Field, DOFS_PER_POINT};
pub use mesh::{build_mesh, ElementData, GaussPoint, Mesh};
pub use recover::{
    deflection_at, deflection_grid, max_abs_deflection, stresses_through_thickness, StressSample,
};
pub use strain::{Constitutive, Strain, StrainOperators};
pub use system::{PlateSystem, ThermalPrestress};
