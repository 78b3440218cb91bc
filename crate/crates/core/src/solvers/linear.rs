use crate::discretization::{PlateSystem, Reduction};
use crate::error::{Error, Result};
use crate::linalg::norm;

/// Solves `K_L q = F` on the free dofs.
pub fn solve_linear_static(system: &PlateSystem, reduction: &Reduction) -> Result<Vec<f64>> {
    let f = reduction.vector(&system.load());
    if norm(&f) == 0.0 {
        return Ok(vec![0.0; system.n_dofs()]);
    }
    let k = reduction.matrix(&system.linear_stiffness());
    let q = k.factorize()?.solve(&f)?;
    if q.iter().any(|v| !v.is_finite()) {
        return Err(Error::Solver(
            "linear stiffness is singular; check the boundary conditions".into(),
        ));
    }
    Ok(reduction.expand(&q))
}
