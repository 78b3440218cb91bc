use gradplate::discretization::{
    build_mesh, deflection_at, BoundaryCondition, ConstraintSet, PlateSystem, Reduction,
};
use gradplate::materials::{lookup, FgmSection, ThermalResultants};
use gradplate::solvers::{
    solve_linear_buckling, solve_linear_static, solve_newton, solve_thermal_buckling,
    solve_thermal_postbuckling, EigenConfig, NewtonConfig, PostBucklingConfig,
    ThermalBucklingProblem,
};
use gradplate::splines::shapes;
use gradplate::thermal::{PropertyTemperature, TemperatureProfile};
use gradplate::DenominatorConvention;
use proptest::prelude::*;

const H: f64 = 0.01;

fn plate(refine: usize, bc: BoundaryCondition, pressure: f64) -> (PlateSystem, Reduction) {
    let mesh = build_mesh(
        &shapes::rectangle(0.2, 0.2, 1, 3).unwrap(),
        (refine, refine),
    )
    .unwrap();
    let section = FgmSection::new(lookup("ZrO2").unwrap(), lookup("Al").unwrap(), 1.0, H).unwrap();
    let stiffness = section.stiffness_with(|_| Ok(300.0)).unwrap();
    let reduction = ConstraintSet::new(&mesh, bc).unwrap().reduction(&mesh.dofs);
    (
        PlateSystem::new(mesh, &stiffness, ThermalResultants::default(), pressure),
        reduction,
    )
}

fn newton(
    system: &mut PlateSystem,
    red: &Reduction,
    steps: usize,
) -> gradplate::solvers::NewtonSolution {
    let p = system.pressure();
    let config = NewtonConfig {
        load_steps: steps,
        ..NewtonConfig::default()
    };
    solve_newton(system, red, &config, |s, f| {
        s.set_pressure(f * p);
        Ok(())
    })
    .unwrap()
}

fn centre(system: &PlateSystem, q: &[f64]) -> f64 {
    deflection_at(system.mesh(), q, 0.5, 0.5).unwrap()
}

#[test]
fn zero_load_gives_zero_solution() {
    let (mut s, red) = plate(4, BoundaryCondition::Ssss1, 0.0);
    assert!(solve_linear_static(&s, &red)
        .unwrap()
        .iter()
        .all(|&v| v == 0.0));
    let sol = newton(&mut s, &red, 3);
    assert!(sol.q.iter().all(|&v| v == 0.0));
    assert!(sol.steps.iter().all(|st| st.iterations == 0));
}

#[test]
fn linear_response_scales_with_load() {
    let (mut s, red) = plate(4, BoundaryCondition::Ssss2, -1e5);
    let q1 = solve_linear_static(&s, &red).unwrap();
    s.set_pressure(-2e5);
    let q2 = solve_linear_static(&s, &red).unwrap();
    let scale = q1.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    for (a, b) in q1.iter().zip(&q2) {
        assert!((2.0 * a - b).abs() < 1e-12 * scale);
    }
    assert!(centre(&s, &q1) < 0.0);
}

#[test]
fn small_load_converges_in_one_iteration() {
    let (mut s, red) = plate(4, BoundaryCondition::Ssss1, -1e-5);
    let sol = newton(&mut s, &red, 1);
    assert_eq!(sol.steps[0].iterations, 1, "{:?}", sol.steps[0].residuals);
    let lin = solve_linear_static(&s, &red).unwrap();
    assert!((centre(&s, &sol.q) / centre(&s, &lin) - 1.0).abs() < 1e-8);
}

#[test]
fn load_stepping_does_not_change_the_answer() {
    let (mut s, red) = plate(5, BoundaryCondition::Ssss1, -1e7);
    let one = newton(&mut s, &red, 1);
    let five = newton(&mut s, &red, 5);
    let scale = one.q.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let diff = one
        .q
        .iter()
        .zip(&five.q)
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(diff < 1e-6 * scale, "{diff} vs {scale}");
    assert_eq!(five.states.len(), 5);
    // deflection grows along the load path
    let w: Vec<f64> = five.states.iter().map(|q| centre(&s, q).abs()).collect();
    assert!(w.windows(2).all(|p| p[1] > p[0]));
}

#[test]
fn membrane_action_stiffens_the_plate() {
    let (mut s, red) = plate(5, BoundaryCondition::Ssss1, -1e7);
    let lin = solve_linear_static(&s, &red).unwrap();
    let nl = newton(&mut s, &red, 5);
    let (wl, wn) = (centre(&s, &lin), centre(&s, &nl.q));
    assert!(wn < 0.0 && wn.abs() < wl.abs(), "{wn} vs {wl}");
}

fn buckling_problem(refine: usize, n: f64) -> ThermalBucklingProblem {
    let mesh = build_mesh(
        &shapes::rectangle(0.2, 0.2, 1, 3).unwrap(),
        (refine, refine),
    )
    .unwrap();
    let reduction = ConstraintSet::new(&mesh, BoundaryCondition::Clamped)
        .unwrap()
        .reduction(&mesh.dofs);
    ThermalBucklingProblem {
        mesh,
        reduction,
        section: FgmSection::new(lookup("Al2O3").unwrap(), lookup("Al").unwrap(), n, H).unwrap(),
        profile: TemperatureProfile::uniform(300.0, 300.0),
        properties: PropertyTemperature::default(),
        convention: DenominatorConvention::OneMinusNu,
    }
}

#[test]
fn postbuckling_path_starts_at_linear_value_and_rises() {
    let problem = buckling_problem(6, 1.0);
    let config = PostBucklingConfig {
        amplitudes: vec![1e-3, 0.2, 0.4, 0.6, 0.8, 1.0],
        ..PostBucklingConfig::default()
    };
    let trace = solve_thermal_postbuckling(&problem, &config).unwrap();
    let lin = trace.linear.delta_t;
    assert!(trace.linear.converged);
    assert!((trace.points[0].delta_t / lin - 1.0).abs() < 5e-3);
    let path: Vec<f64> = trace.points.iter().map(|p| p.delta_t).collect();
    assert!(path.windows(2).all(|w| w[1] > w[0]), "{path:?}");
    assert!(trace.points.iter().all(|p| p.converged && !p.mode_switch));
}

#[test]
fn thermal_buckling_matches_direct_eigen_solve() {
    let problem = buckling_problem(6, 0.0);
    let tb = solve_thermal_buckling(&problem, &PostBucklingConfig::default()).unwrap();
    let stiffness = problem.section.stiffness_with(|_| Ok(300.0)).unwrap();
    let s = PlateSystem::new(
        problem.mesh.clone(),
        &stiffness,
        ThermalResultants::default(),
        0.0,
    );
    let b = solve_linear_buckling(
        &s.linear_stiffness(),
        &s.initial_stress([1.0, 1.0, 0.0]),
        &problem.reduction,
        1.0,
        &EigenConfig::default(),
    )
    .unwrap();
    assert!((tb.critical_force / b.critical_force - 1.0).abs() < 1e-10);
    // homogeneous section: N_cr = E alpha h / (1 - nu) * dT
    let al2o3 = lookup("Al2O3").unwrap();
    let e = al2o3.youngs_modulus.p0;
    let x = e * al2o3.alpha.p0 * H / (1.0 - al2o3.nu.p0);
    assert!((tb.delta_t * x / b.critical_force - 1.0).abs() < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn buckling_load_is_homogeneous_in_prestress(c in 0.05f64..20.0) {
        let (s, _) = plate(4, BoundaryCondition::Clamped, 0.0);
        let red = ConstraintSet::new(s.mesh(), BoundaryCondition::Clamped).unwrap().reduction(&s.mesh().dofs);
        let kl = s.linear_stiffness();
        let k0 = s.initial_stress([1.0, 1.0, 0.0]);
        let cfg = EigenConfig::default();
        let base = solve_linear_buckling(&kl, &k0, &red, 1.0, &cfg).unwrap();
        let scaled = solve_linear_buckling(&kl, &k0.scaled(c), &red, 1.0, &cfg).unwrap();
        prop_assert!((scaled.load_factor * c / base.load_factor - 1.0).abs() < 1e-10);
    }
}
