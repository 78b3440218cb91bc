use serde::{Deserialize, Serialize};

use super::eigen::{orient_mode, seeded_buckling, EigenConfig};
use crate::discretization::{max_abs_deflection, Mesh, PlateSystem, Reduction};
use crate::error::{arg, Result};
use crate::linalg::{dot, SparseMatrix};
use crate::materials::{DenominatorConvention, FgmSection, ThermalResultants};
use crate::thermal::{critical_delta_t, PropertyTemperature, TemperatureProfile, ThermalField};

/// A constrained plate under a thermal profile whose loading parameter
/// (see [`TemperatureProfile::rise`]) is the unknown critical value.
#[derive(Debug, Clone)]
pub struct ThermalBucklingProblem {
    pub mesh: Mesh,
    pub reduction: Reduction,
    pub section: FgmSection,
    pub profile: TemperatureProfile,
    pub properties: PropertyTemperature,
    pub convention: DenominatorConvention,
}

impl ThermalBucklingProblem {
    pub fn field_at(&self, rise: f64) -> Result<ThermalField> {
        ThermalField::new(self.profile.with_rise(rise), &self.section, self.properties)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PostBucklingConfig {
    /// Mode amplitudes `max |w| / h`, strictly increasing.
    pub amplitudes: Vec<f64>,
    /// Relative change of the critical rise that ends the iteration.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Parametric grid size on which `max |w|` is measured.
    pub grid: usize,
    /// Mode overlap below which a mode switch is reported.
    pub overlap_threshold: f64,
    pub eigen: EigenConfig,
}

impl Default for PostBucklingConfig {
    fn default() -> Self {
        Self {
            amplitudes: (0..20)
                .map(|k| 0.05 + k as f64 * (2.0 - 0.05) / 19.0)
                .collect(),
            tolerance: 0.01,
            max_iterations: 50,
            grid: 21,
            overlap_threshold: 0.5,
            eigen: EigenConfig::default(),
        }
    }
}

impl PostBucklingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.amplitudes.iter().any(|a| !(*a > 0.0)) {
            return Err(arg("post-buckling amplitudes must be positive"));
        }
        if self.amplitudes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(arg("post-buckling amplitudes must be strictly increasing"));
        }
        if !(self.tolerance > 0.0) || self.max_iterations == 0 || self.grid < 2 {
            return Err(arg(
                "post-buckling tolerance, iteration cap and grid must be positive",
            ));
        }
        Ok(())
    }
}

/// Critical temperature rise of the flat plate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalBuckling {
    pub delta_t: f64,
    pub critical_force: f64,
    pub mode: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostBucklingPoint {
    pub amplitude: f64,
    pub delta_t: f64,
    pub critical_force: f64,
    pub iterations: usize,
    pub converged: bool,
    pub mode_switch: bool,
    pub overlap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostBucklingTrace {
    pub linear: ThermalBuckling,
    pub points: Vec<PostBucklingPoint>,
}

struct Iterate {
    delta_t: f64,
    critical_force: f64,
    mode: Vec<f64>,
    iterations: usize,
    converged: bool,
    residual: f64,
}

/// Fixed-point iteration on the critical rise at one mode amplitude: solve
/// `(K_L + K_NL - lambda K_0) q = 0` with `K_0` from a unit isotropic
/// membrane force, convert `lambda = N_cr` into a temperature rise,
/// re-evaluate the properties there and rescale the mode to `amplitude`.
/// `amplitude = 0` is linear buckling.
fn iterate(
    problem: &ThermalBucklingProblem,
    system: &mut PlateSystem,
    k0: &SparseMatrix,
    amplitude: f64,
    start: (f64, Option<&[f64]>),
    tolerance: f64,
    max_iterations: usize,
    config: &PostBucklingConfig,
) -> Result<Iterate> {
    let h = problem.section.thickness;
    let (mut rise, seed) = start;
    let mut q = match seed {
        Some(m) if amplitude > 0.0 => scaled_mode(&problem.mesh, m, amplitude * h, config.grid)?,
        _ => vec![0.0; system.n_dofs()],
    };
    let mut out: Option<Iterate> = None;
    for it in 1..=max_iterations {
        let field = problem.field_at(rise)?;
        system.set_stiffness(&problem.section.stiffness(&field)?);
        let mut a = system.linear_stiffness();
        if amplitude > 0.0 {
            a = a.add_scaled(&system.nonlinear_stiffness(&q).symmetric_part(), 1.0);
        }
        let guess = out.as_ref().map(|o| o.mode.as_slice()).or(seed);
        let b = seeded_buckling(&a, k0, &problem.reduction, 1.0, &config.eigen, guess)?;
        let scalars = problem
            .section
            .thermal_scalars(&field, problem.convention)?;
        let new_rise = critical_delta_t(
            b.critical_force,
            problem.profile.kind,
            &scalars,
            problem.profile.bottom,
            problem.profile.initial,
        )?;
        if amplitude > 0.0 {
            q = scaled_mode(&problem.mesh, &b.mode, amplitude * h, config.grid)?;
        }
        let converged = it > 1 && (new_rise - rise).abs() < tolerance * new_rise.abs();
        rise = new_rise;
        out = Some(Iterate {
            delta_t: rise,
            critical_force: b.critical_force,
            mode: b.mode,
            iterations: it,
            converged,
            residual: b.residual,
        });
        if converged {
            break;
        }
    }
    Ok(out.expect("at least one iteration"))
}

fn scaled_mode(mesh: &Mesh, mode: &[f64], w_max: f64, grid: usize) -> Result<Vec<f64>> {
    let peak = max_abs_deflection(mesh, mode, grid)?;
    let s = if peak > 0.0 { w_max / peak } else { 0.0 };
    Ok(mode.iter().map(|v| v * s).collect())
}

fn unit_prestress_system(problem: &ThermalBucklingProblem) -> Result<(PlateSystem, SparseMatrix)> {
    let field = problem.field_at(0.0)?;
    let stiffness = problem.section.stiffness(&field)?;
    let system = PlateSystem::new(
        problem.mesh.clone(),
        &stiffness,
        ThermalResultants::default(),
        0.0,
    );
    let k0 = system.initial_stress([1.0, 1.0, 0.0]);
    Ok((system, k0))
}

/// Critical rise of the flat plate, iterating the properties to the
/// critical temperature when they are temperature dependent.
pub fn solve_thermal_buckling(
    problem: &ThermalBucklingProblem,
    config: &PostBucklingConfig,
) -> Result<ThermalBuckling> {
    let (mut system, k0) = unit_prestress_system(problem)?;
    linear_stage(problem, &mut system, &k0, config)
}

fn linear_stage(
    problem: &ThermalBucklingProblem,
    system: &mut PlateSystem,
    k0: &SparseMatrix,
    config: &PostBucklingConfig,
) -> Result<ThermalBuckling> {
    // Tighter than the path tolerance: this value anchors the a -> 0 limit.
    let tol = config.tolerance.min(1e-8);
    let it = iterate(
        problem,
        system,
        k0,
        0.0,
        (0.0, None),
        tol,
        config.max_iterations,
        config,
    )?;
    Ok(ThermalBuckling {
        delta_t: it.delta_t,
        critical_force: it.critical_force,
        mode: it.mode,
        iterations: it.iterations,
        converged: it.converged,
        residual: it.residual,
    })
}

/// Post-buckling path: for each amplitude the critical rise is iterated to
/// the relative tolerance, warm-started from the previous amplitude.
/// Entries that hit the iteration cap are kept and marked unconverged.
pub fn solve_thermal_postbuckling(
    problem: &ThermalBucklingProblem,
    config: &PostBucklingConfig,
) -> Result<PostBucklingTrace> {
    config.validate()?;
    let (mut system, k0) = unit_prestress_system(problem)?;
    let linear = linear_stage(problem, &mut system, &k0, config)?;
    let mut points = Vec::with_capacity(config.amplitudes.len());
    let mut prev_mode = linear.mode.clone();
    let mut rise = linear.delta_t;
    for &a in &config.amplitudes {
        let it = iterate(
            problem,
            &mut system,
            &k0,
            a,
            (rise, Some(&prev_mode)),
            config.tolerance,
            config.max_iterations,
            config,
        )?;
        let mut mode = it.mode;
        orient_mode(&mut mode);
        let overlap = dot(&mode, &prev_mode).abs();
        points.push(PostBucklingPoint {
            amplitude: a,
            delta_t: it.delta_t,
            critical_force: it.critical_force,
            iterations: it.iterations,
            converged: it.converged,
            mode_switch: overlap < config.overlap_threshold,
            overlap,
        });
        rise = it.delta_t;
        prev_mode = mode;
    }
    Ok(PostBucklingTrace { linear, points })
}
