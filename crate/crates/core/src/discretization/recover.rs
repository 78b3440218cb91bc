use serde::{Deserialize, Serialize};

use super::dofs::{Field, DOFS_PER_POINT};
use super::mesh::Mesh;
use crate::error::Result;
use crate::materials::{reddy_f, reddy_f_prime, FgmSection, Property};
use crate::thermal::ThermalField;

/// Stresses at one thickness coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StressSample {
    pub z: f64,
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub tau_xy: f64,
    pub tau_xz: f64,
    pub tau_yz: f64,
}

fn field_sum(values: &[f64], indices: &[usize], q: &[f64], field: Field) -> f64 {
    values
        .iter()
        .zip(indices)
        .map(|(r, &a)| r * q[DOFS_PER_POINT * a + field as usize])
        .sum()
}

/// Deflection at parametric point `(xi, eta)`.
pub fn deflection_at(mesh: &Mesh, q: &[f64], xi: f64, eta: f64) -> Result<f64> {
    let pb = mesh.surface.physical_basis(xi, eta)?;
    Ok(field_sum(&pb.r, &pb.indices, q, Field::W))
}

/// Deflections on an `n x n` uniform parametric grid, row-major in eta.
pub fn deflection_grid(mesh: &Mesh, q: &[f64], n: usize) -> Result<Vec<f64>> {
    let t = |k: usize| {
        if n == 1 {
            0.5
        } else {
            k as f64 / (n - 1) as f64
        }
    };
    let mut out = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            out.push(deflection_at(mesh, q, t(i), t(j))?);
        }
    }
    Ok(out)
}

/// Largest `|w|` on an `n x n` parametric grid.
pub fn max_abs_deflection(mesh: &Mesh, q: &[f64], n: usize) -> Result<f64> {
    Ok(deflection_grid(mesh, q, n)?
        .iter()
        .fold(0.0, |m, w| m.max(w.abs())))
}

/// In-plane and transverse shear stresses at `(xi, eta)` for each `z`,
/// including the von Karman membrane strain and the thermal strain of
/// `field`.
pub fn stresses_through_thickness(
    mesh: &Mesh,
    q: &[f64],
    section: &FgmSection,
    field: &ThermalField,
    xi: f64,
    eta: f64,
    zs: &[f64],
) -> Result<Vec<StressSample>> {
    let pb = mesh.surface.physical_basis(xi, eta)?;
    let idx = &pb.indices;
    let d = |vals: &[f64], f: Field| field_sum(vals, idx, q, f);
    let (wx, wy) = (d(&pb.rx, Field::W), d(&pb.ry, Field::W));
    let eps0 = [
        d(&pb.rx, Field::U) + 0.5 * wx * wx,
        d(&pb.ry, Field::V) + 0.5 * wy * wy,
        d(&pb.ry, Field::U) + d(&pb.rx, Field::V) + wx * wy,
    ];
    let k1 = [
        -d(&pb.rxx, Field::W),
        -d(&pb.ryy, Field::W),
        -2.0 * d(&pb.rxy, Field::W),
    ];
    let k2 = [
        d(&pb.rx, Field::BetaX),
        d(&pb.ry, Field::BetaY),
        d(&pb.ry, Field::BetaX) + d(&pb.rx, Field::BetaY),
    ];
    let beta = [d(&pb.r, Field::BetaX), d(&pb.r, Field::BetaY)];
    let h = section.thickness;
    zs.iter()
        .map(|&z| {
            let t = field.property_kelvin(z)?;
            let e = section.effective(Property::YoungsModulus, z, t)?;
            let nu = section.effective(Property::Poisson, z, t)?;
            let alpha = section.effective(Property::Expansion, z, t)?;
            let dt = field.delta(z)?;
            let q11 = e / (1.0 - nu * nu);
            let q12 = nu * q11;
            let q66 = 0.5 * e / (1.0 + nu);
            let f = reddy_f(z, h);
            let fp = reddy_f_prime(z, h);
            let eps: Vec<f64> = (0..3).map(|k| eps0[k] + z * k1[k] + f * k2[k]).collect();
            let th = e * alpha / (1.0 - nu) * dt;
            Ok(StressSample {
                z,
                sigma_x: q11 * eps[0] + q12 * eps[1] - th,
                sigma_y: q12 * eps[0] + q11 * eps[1] - th,
                tau_xy: q66 * eps[2],
                tau_xz: q66 * fp * beta[0],
                tau_yz: q66 * fp * beta[1],
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::{build_mesh, DofMap};
    use crate::materials::lookup;
    use crate::splines::shapes;
    use crate::thermal::{PropertyTemperature, TemperatureProfile};

    fn setup() -> (Mesh, FgmSection, ThermalField, Vec<f64>) {
        let mesh = build_mesh(&shapes::rectangle(1.0, 1.0, 1, 2).unwrap(), (2, 2)).unwrap();
        let sec = FgmSection::homogeneous(lookup("Al").unwrap(), 0.1).unwrap();
        let field = ThermalField::new(
            TemperatureProfile::uniform(300.0, 300.0),
            &sec,
            PropertyTemperature::default(),
        )
        .unwrap();
        let map = DofMap::new(mesh.surface.n_control_points());
        let mut q = vec![0.0; map.n_dofs()];
        let sq = mesh.surface.knots_u().square_coefficients();
        let nu = mesh.surface.net_size().0;
        for a in 0..map.n_points() {
            q[map.dof(a, Field::W)] = 1e-3 * sq[a % nu];
            q[map.dof(a, Field::BetaX)] = 1e-3;
            q[map.dof(a, Field::BetaY)] = -2e-3;
        }
        (mesh, sec, field, q)
    }

    #[test]
    fn quadratic_deflection_reproduced() {
        let (mesh, _, _, q) = setup();
        for &(xi, eta) in &[(0.3, 0.1), (0.77, 0.5), (1.0, 1.0)] {
            let w = deflection_at(&mesh, &q, xi, eta).unwrap();
            assert!((w - 1e-3 * xi * xi).abs() < 1e-15);
        }
        assert!((max_abs_deflection(&mesh, &q, 21).unwrap() - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn shear_stress_is_parabolic_and_traction_free() {
        let (mesh, sec, field, q) = setup();
        let zs = [-0.05, -0.025, 0.0, 0.03, 0.05];
        let s = stresses_through_thickness(&mesh, &q, &sec, &field, 0.4, 0.6, &zs).unwrap();
        assert_eq!(s[0].tau_xz, 0.0);
        assert_eq!(s[4].tau_yz, 0.0);
        let t0 = s[2].tau_xz;
        let g = 70e9 / 2.6;
        assert!((t0 - g * 1e-3).abs() < 1e-6 * t0.abs());
        for p in &s {
            let shape = 1.0 - 4.0 * p.z * p.z / 0.01;
            assert!((p.tau_xz - t0 * shape).abs() < 1e-9 * t0.abs());
            assert!((p.tau_yz + 2.0 * t0 * shape).abs() < 1e-9 * t0.abs());
        }
    }

    #[test]
    fn bending_stress_linear_plus_cubic_in_z() {
        let (mesh, sec, field, q) = setup();
        // w = 1e-3 x^2: kappa1_x = -2e-3; beta constant: kappa2 = 0;
        // membrane strain 1/2 w_x^2 = 2e-6 x^2.
        let x = 0.25;
        let s = stresses_through_thickness(&mesh, &q, &sec, &field, x, 0.5, &[0.02]).unwrap()[0];
        let q11 = 70e9 / (1.0 - 0.09);
        let ex = 2e-6 * x * x - 0.02 * 2e-3;
        assert!((s.sigma_x - q11 * ex).abs() < 1e-9 * (q11 * ex).abs());
        assert!((s.sigma_y - 0.3 * q11 * ex).abs() < 1e-9 * (q11 * ex).abs());
    }
}
