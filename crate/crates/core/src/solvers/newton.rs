use serde::{Deserialize, Serialize};

use crate::discretization::{PlateSystem, Reduction};
use crate::error::{arg, Error, Result};
use crate::linalg::norm;

/// Newton-Raphson settings. Loads are applied in `load_steps` increments;
/// each increment is `step_scaling` times the previous one (1 = uniform).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NewtonConfig {
    /// Relative residual `||phi|| / ||F||` at which a step is accepted.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub load_steps: usize,
    pub step_scaling: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-9,
            max_iterations: 30,
            load_steps: 5,
            step_scaling: 1.0,
        }
    }
}

impl NewtonConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(arg(format!(
                "Newton tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.load_steps == 0 {
            return Err(arg("Newton needs at least one load step"));
        }
        if self.max_iterations == 0 {
            return Err(arg("Newton needs at least one iteration"));
        }
        if !(self.step_scaling > 0.0) {
            return Err(arg(format!(
                "step scaling must be positive, got {}",
                self.step_scaling
            )));
        }
        Ok(())
    }

    /// Cumulative load factors, ending at exactly 1.
    pub fn load_factors(&self) -> Vec<f64> {
        let n = self.load_steps;
        let incr: Vec<f64> = (0..n).map(|k| self.step_scaling.powi(k as i32)).collect();
        let total: f64 = incr.iter().sum();
        let mut acc = 0.0;
        let mut out: Vec<f64> = incr
            .iter()
            .map(|d| {
                acc += d / total;
                acc
            })
            .collect();
        out[n - 1] = 1.0;
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewtonStep {
    pub load_factor: f64,
    /// Relative residual before each correction and after the last one.
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonSolution {
    pub q: Vec<f64>,
    pub steps: Vec<NewtonStep>,
    /// Converged state after each load step.
    pub states: Vec<Vec<f64>>,
}

/// Load-stepped Newton-Raphson: `update(system, factor)` sets the loads
/// (and, if needed, the stiffness) for each cumulative load factor, then
/// `dq = -K_T^-1 phi` is iterated until the relative residual is below the
/// tolerance. Each step warm-starts from the previous converged state.
pub fn solve_newton<U>(
    system: &mut PlateSystem,
    reduction: &Reduction,
    config: &NewtonConfig,
    mut update: U,
) -> Result<NewtonSolution>
where
    U: FnMut(&mut PlateSystem, f64) -> Result<()>,
{
    config.validate()?;
    let mut q = vec![0.0; system.n_dofs()];
    let mut steps = Vec::with_capacity(config.load_steps);
    let mut states = Vec::with_capacity(config.load_steps);
    for factor in config.load_factors() {
        update(system, factor)?;
        let f_norm = norm(&reduction.vector(&system.load()));
        let mut residuals = Vec::new();
        let mut iterations = 0;
        loop {
            let r = reduction.vector(&system.residual(&q));
            let r_norm = norm(&r);
            let rel = if f_norm > 0.0 {
                r_norm / f_norm
            } else {
                r_norm
            };
            residuals.push(rel);
            if rel < config.tolerance || (f_norm == 0.0 && r_norm == 0.0) {
                break;
            }
            if iterations == config.max_iterations || !rel.is_finite() {
                return Err(Error::NewtonDiverged {
                    iterations,
                    residual: rel,
                });
            }
            let kt = reduction.matrix(&system.tangent_stiffness(&q));
            let neg: Vec<f64> = r.iter().map(|v| -v).collect();
            let dq =
                kt.factorize()
                    .and_then(|f| f.solve(&neg))
                    .map_err(|_| Error::Bifurcation {
                        load_factor: factor,
                    })?;
            if dq.iter().any(|v| !v.is_finite()) {
                return Err(Error::Bifurcation {
                    load_factor: factor,
                });
            }
            for (qi, di) in q.iter_mut().zip(reduction.expand(&dq)) {
                *qi += di;
            }
            iterations += 1;
        }
        steps.push(NewtonStep {
            load_factor: factor,
            residuals,
            iterations,
        });
        states.push(q.clone());
    }
    Ok(NewtonSolution { q, steps, states })
}

/// Observed convergence order from the last three residuals above the
/// round-off floor: `log(r_k / r_{k-1}) / log(r_{k-1} / r_{k-2})`.
pub fn convergence_order(residuals: &[f64]) -> Option<f64> {
    let r: Vec<f64> = residuals.iter().copied().filter(|&v| v > 1e-14).collect();
    if r.len() < 3 {
        return None;
    }
    let n = r.len();
    let num = (r[n - 1] / r[n - 2]).ln();
    let den = (r[n - 2] / r[n - 3]).ln();
    Some(num / den)
}
