use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::spec::{Analysis, CaseSpec};
use crate::discretization::{
    build_mesh, deflection_at, stresses_through_thickness, ConstraintSet, Mesh, PlateSystem,
    Reduction,
};
use crate::error::Result;
use crate::materials::{FgmSection, Property};
use crate::solvers::{
    convergence_order, solve_linear_static, solve_newton, solve_thermal_buckling,
    solve_thermal_postbuckling, NewtonStep, PostBucklingTrace, ThermalBucklingProblem,
};
use crate::thermal::ThermalField;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeshSummary {
    pub degree: usize,
    pub refine: usize,
    pub elements: usize,
    pub control_points: usize,
    pub dofs: usize,
    pub free_dofs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StaticSummary {
    /// `w / h` at the output point.
    pub w_bar: f64,
    pub w: f64,
    /// `f_z a^4 / (E_m h^4)`.
    pub load_parameter: f64,
    pub newton_steps: Option<Vec<NewtonStep>>,
    pub convergence_order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BucklingSummary {
    pub delta_t_cr: f64,
    /// Critical thermal membrane force (N/m).
    pub n_cr: f64,
    /// `alpha Delta T_cr x 1e4`, homogeneous sections only.
    pub delta_t_star: Option<f64>,
    /// `Delta T_cr E alpha a^2 h / (pi^2 D)`, homogeneous sections only.
    pub t_star: Option<f64>,
    pub eigen_residual: f64,
    pub property_iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub name: String,
    pub analysis: Analysis,
    pub mesh: MeshSummary,
    pub characteristic_length: f64,
    pub thickness: f64,
    pub static_result: Option<StaticSummary>,
    pub buckling: Option<BucklingSummary>,
    pub postbuckling: Option<PostBucklingTrace>,
}

/// One row of `curve.csv`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveRow {
    pub step: usize,
    pub load_parameter: f64,
    pub delta_t: f64,
    /// `w / h` for static analyses, mode amplitude for buckling.
    pub w_bar: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseResult {
    pub summary: Summary,
    pub curve: Vec<CurveRow>,
    /// `(z/h, sigma_x, tau_xz)`, normalized when the pressure is nonzero.
    pub through_thickness: Vec<[f64; 3]>,
    pub normalized_stresses: bool,
    /// Final full dof vector for static analyses, critical mode otherwise.
    pub q: Vec<f64>,
}

struct Setup {
    mesh: Mesh,
    reduction: Reduction,
    section: FgmSection,
}

fn setup(spec: &CaseSpec) -> Result<Setup> {
    spec.validate()?;
    let surface = spec.geometry.surface(spec.mesh.degree)?;
    let mesh = build_mesh(&surface, (spec.mesh.refine, spec.mesh.refine))?;
    let reduction = ConstraintSet::new(&mesh, spec.boundary)?.reduction(&mesh.dofs);
    Ok(Setup {
        mesh,
        reduction,
        section: spec.section()?,
    })
}

/// Runs one case to completion.
pub fn run_case(spec: &CaseSpec) -> Result<CaseResult> {
    let s = setup(spec)?;
    let mesh_summary = MeshSummary {
        degree: spec.mesh.degree,
        refine: spec.mesh.refine,
        elements: s.mesh.elements.len(),
        control_points: s.mesh.surface.n_control_points(),
        dofs: s.mesh.n_dofs(),
        free_dofs: s.reduction.n_free(),
    };
    let mut summary = Summary {
        name: spec.name.clone(),
        analysis: spec.analysis,
        mesh: mesh_summary,
        characteristic_length: spec.geometry.characteristic_length(),
        thickness: spec.thickness,
        static_result: None,
        buckling: None,
        postbuckling: None,
    };
    match spec.analysis {
        Analysis::Linear | Analysis::Newton => run_static(spec, s, summary),
        Analysis::Buckling | Analysis::Postbuckling => {
            let problem = ThermalBucklingProblem {
                mesh: s.mesh,
                reduction: s.reduction,
                section: s.section,
                profile: spec.temperature(),
                properties: spec.properties,
                convention: spec.solver.denominator,
            };
            let cfg = &spec.solver.buckling;
            let (linear, trace) = if spec.analysis == Analysis::Buckling {
                (solve_thermal_buckling(&problem, cfg)?, None)
            } else {
                let t = solve_thermal_postbuckling(&problem, cfg)?;
                (t.linear.clone(), Some(t))
            };
            let field = problem.field_at(linear.delta_t)?;
            let (ds, ts) = normalized_buckling(
                &problem.section,
                &field,
                linear.delta_t,
                summary.characteristic_length,
            )?;
            summary.buckling = Some(BucklingSummary {
                delta_t_cr: linear.delta_t,
                n_cr: linear.critical_force,
                delta_t_star: ds,
                t_star: ts,
                eigen_residual: linear.residual,
                property_iterations: linear.iterations,
                converged: linear.converged,
            });
            let mut curve = vec![CurveRow {
                step: 0,
                load_parameter: 0.0,
                delta_t: linear.delta_t,
                w_bar: 0.0,
                converged: linear.converged,
            }];
            if let Some(t) = &trace {
                curve.extend(t.points.iter().enumerate().map(|(k, p)| CurveRow {
                    step: k + 1,
                    load_parameter: 0.0,
                    delta_t: p.delta_t,
                    w_bar: p.amplitude,
                    converged: p.converged,
                }));
            }
            summary.postbuckling = trace;
            Ok(CaseResult {
                summary,
                curve,
                through_thickness: Vec::new(),
                normalized_stresses: false,
                q: linear.mode,
            })
        }
    }
}

fn normalized_buckling(
    section: &FgmSection,
    field: &ThermalField,
    delta_t: f64,
    a: f64,
) -> Result<(Option<f64>, Option<f64>)> {
    if !section.is_homogeneous() {
        return Ok((None, None));
    }
    let t = field.property_kelvin(0.0)?;
    let alpha = section.effective(Property::Expansion, 0.0, t)?;
    let nu = section.effective(Property::Poisson, 0.0, t)?;
    let h = section.thickness;
    // E alpha a^2 h / (pi^2 E h^3 / (12 (1 - nu^2)))
    let t_star =
        delta_t * alpha * a * a * 12.0 * (1.0 - nu * nu) / (std::f64::consts::PI.powi(2) * h * h);
    Ok((Some(alpha * delta_t * 1e4), Some(t_star)))
}

fn run_static(spec: &CaseSpec, s: Setup, mut summary: Summary) -> Result<CaseResult> {
    let profile = spec.temperature();
    let field_at =
        |factor: f64| ThermalField::new(profile.scaled(factor), &s.section, spec.properties);
    let full = field_at(1.0)?;
    let mut system = PlateSystem::new(
        s.mesh.clone(),
        &s.section.stiffness(&full)?,
        s.section.thermal_resultants(&full)?,
        spec.loads.pressure,
    );
    let h = spec.thickness;
    let a = summary.characteristic_length;
    let [px, py] = spec.output.point;
    let e_m = s
        .section
        .metal
        .property_at(Property::YoungsModulus, full.property_kelvin(-0.5 * h)?)?;
    let p_bar = |factor: f64| factor * spec.loads.pressure * a.powi(4) / (e_m * h.powi(4));
    let w_bar = |q: &[f64]| -> Result<f64> { Ok(deflection_at(&s.mesh, q, px, py)? / h) };

    let (q, curve, steps, order) = if spec.analysis == Analysis::Linear {
        let q = solve_linear_static(&system, &s.reduction)?;
        let row = CurveRow {
            step: 1,
            load_parameter: p_bar(1.0),
            delta_t: profile.rise(),
            w_bar: w_bar(&q)?,
            converged: true,
        };
        (q, vec![row], None, None)
    } else {
        let sol = solve_newton(&mut system, &s.reduction, &spec.solver.newton, |sys, f| {
            let field = field_at(f)?;
            sys.set_stiffness(&s.section.stiffness(&field)?);
            sys.set_thermal(s.section.thermal_resultants(&field)?);
            sys.set_pressure(f * spec.loads.pressure);
            Ok(())
        })?;
        let mut curve = Vec::with_capacity(sol.steps.len());
        for (k, (st, q)) in sol.steps.iter().zip(&sol.states).enumerate() {
            curve.push(CurveRow {
                step: k + 1,
                load_parameter: p_bar(st.load_factor),
                delta_t: st.load_factor * profile.rise(),
                w_bar: w_bar(q)?,
                converged: true,
            });
        }
        let order = sol
            .steps
            .last()
            .and_then(|st| convergence_order(&st.residuals));
        (sol.q, curve, Some(sol.steps), order)
    };

    let n = spec.output.thickness_points;
    let zs: Vec<f64> = (0..n)
        .map(|k| h * (k as f64 / (n - 1) as f64 - 0.5))
        .collect();
    let stresses = stresses_through_thickness(&s.mesh, &q, &s.section, &full, px, py, &zs)?;
    let fz = spec.loads.pressure;
    let normalized = fz != 0.0;
    let through_thickness = stresses
        .iter()
        .map(|st| {
            if normalized {
                [
                    st.z / h,
                    st.sigma_x * h * h / (fz * a * a),
                    st.tau_xz * h / (fz * a),
                ]
            } else {
                [st.z / h, st.sigma_x, st.tau_xz]
            }
        })
        .collect();

    let w = deflection_at(&s.mesh, &q, px, py)?;
    summary.static_result = Some(StaticSummary {
        w_bar: w / h,
        w,
        load_parameter: p_bar(1.0),
        newton_steps: steps,
        convergence_order: order,
    });
    Ok(CaseResult {
        summary,
        curve,
        through_thickness,
        normalized_stresses: normalized,
        q,
    })
}

impl CaseResult {
    pub fn summary_json(&self) -> String {
        let mut s =
            serde_json::to_string_pretty(&self.summary).expect("summaries always serialize");
        s.push('\n');
        s
    }

    pub fn curve_csv(&self) -> String {
        let mut out = String::from("step,P_bar,delta_T,w_bar,converged\n");
        for r in &self.curve {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.step, r.load_parameter, r.delta_t, r.w_bar, r.converged
            );
        }
        out
    }

    pub fn through_thickness_csv(&self) -> String {
        let mut out = String::from(if self.normalized_stresses {
            "z_over_h,sigma_bar_x,tau_bar_xz\n"
        } else {
            "z_over_h,sigma_x,tau_xz\n"
        });
        for r in &self.through_thickness {
            let _ = writeln!(out, "{},{},{}", r[0], r[1], r[2]);
        }
        out
    }

    /// Writes `summary.json`, `curve.csv` and, for static analyses,
    /// `through_thickness.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("summary.json"), self.summary_json())?;
        std::fs::write(dir.join("curve.csv"), self.curve_csv())?;
        if !self.through_thickness.is_empty() {
            std::fs::write(
                dir.join("through_thickness.csv"),
                self.through_thickness_csv(),
            )?;
        }
        Ok(())
    }
}
