use nalgebra::{DMatrix, Matrix2};
use rayon::prelude::*;

use super::dofs::{Field, DOFS_PER_POINT};
use super::mesh::{ElementData, Mesh};
use super::strain::{symmetrize_upper, Constitutive, Strain, StrainOperators};
use crate::linalg::SparseMatrix;
use crate::materials::{ConstitutiveResultants, ThermalResultants};

/// In-plane force resultant `(N_x, N_y, N_xy)` used as a prestress.
pub type ThermalPrestress = [f64; 3];

/// Global operators of one plate problem: stiffness, thermal prestress and
/// transverse pressure on a fixed mesh.
#[derive(Debug, Clone)]
pub struct PlateSystem {
    mesh: Mesh,
    d_hat: Constitutive,
    sigma0: Strain,
    thermal: ThermalResultants,
    pressure: f64,
}

impl PlateSystem {
    pub fn new(
        mesh: Mesh,
        stiffness: &ConstitutiveResultants,
        thermal: ThermalResultants,
        pressure: f64,
    ) -> Self {
        Self {
            mesh,
            d_hat: stiffness.d_hat(),
            sigma0: thermal.sigma0(),
            thermal,
            pressure,
        }
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn n_dofs(&self) -> usize {
        self.mesh.n_dofs()
    }

    pub fn set_stiffness(&mut self, stiffness: &ConstitutiveResultants) {
        self.d_hat = stiffness.d_hat();
    }

    pub fn set_thermal(&mut self, thermal: ThermalResultants) {
        self.sigma0 = thermal.sigma0();
        self.thermal = thermal;
    }

    pub fn set_pressure(&mut self, pressure: f64) {
        self.pressure = pressure;
    }

    pub fn thermal(&self) -> &ThermalResultants {
        &self.thermal
    }

    pub fn pressure(&self) -> f64 {
        self.pressure
    }

    pub fn d_hat(&self) -> &Constitutive {
        &self.d_hat
    }

    /// `K_L = sum B_L^T D B_L`.
    pub fn linear_stiffness(&self) -> SparseMatrix {
        self.assemble_matrix(|e| {
            let n = e.dofs.len();
            let mut ke = DMatrix::zeros(n, n);
            for g in &e.points {
                let ops = StrainOperators::new(g);
                ops.add_transpose_product_upper(&mut ke, g.weight, &ops.times(&self.d_hat));
            }
            symmetrize_upper(&mut ke);
            ke
        })
    }

    /// Secant nonlinear stiffness
    /// `K_NL = sum (1/2 B_L^T D B_NL + B_NL^T D B_L + 1/2 B_NL^T D B_NL)`,
    /// evaluated as `B_NL^T D (B_L + 1/2 B_NL) + 1/2 B_L^T D B_NL`.
    /// Not symmetric in general.
    pub fn nonlinear_stiffness(&self, q: &[f64]) -> SparseMatrix {
        self.assemble_matrix(|e| {
            let ql = local(e, q);
            let n = e.dofs.len();
            let mut ke = DMatrix::zeros(n, n);
            for g in &e.points {
                let ops = StrainOperators::new(g);
                let slope = ops.slope(&ql);
                let bnl = ops.nonlinear(slope);
                let half = ops.plus_nonlinear(slope, 0.5);
                bnl.add_transpose_product(&mut ke, g.weight, &half.times(&self.d_hat));
                ops.add_transpose_product(&mut ke, 0.5 * g.weight, &bnl.times(&self.d_hat));
            }
            ke
        })
    }

    /// Initial-stress matrix `sum B_g^T [[Nx, Nxy], [Nxy, Ny]] B_g`.
    pub fn initial_stress(&self, n: ThermalPrestress) -> SparseMatrix {
        let nm = Matrix2::new(n[0], n[2], n[2], n[1]);
        self.assemble_matrix(|e| {
            let k = e.dofs.len();
            let mut ke = DMatrix::zeros(k, k);
            for g in &e.points {
                StrainOperators::new(g).add_slope_product(&mut ke, g.weight, &nm);
            }
            ke
        })
    }

    /// Initial-stress matrix of the current thermal membrane resultant.
    pub fn thermal_initial_stress(&self) -> SparseMatrix {
        self.initial_stress(self.thermal.n)
    }

    /// Geometric stiffness of the current membrane force
    /// `N = (D eps)_membrane - N_th` at state `q`.
    pub fn geometric_stiffness(&self, q: &[f64]) -> SparseMatrix {
        self.assemble_matrix(|e| {
            let ql = local(e, q);
            let k = e.dofs.len();
            let mut ke = DMatrix::zeros(k, k);
            for g in &e.points {
                let ops = StrainOperators::new(g);
                let (_, _, nm) = self.point_state(&ops, &ql);
                ops.add_slope_product(&mut ke, g.weight, &nm);
            }
            ke
        })
    }

    /// Consistent tangent `dphi/dq`:
    /// `sum (B_L + B_NL)^T D (B_L + B_NL) + B_g^T N B_g`.
    pub fn tangent_stiffness(&self, q: &[f64]) -> SparseMatrix {
        self.assemble_matrix(|e| {
            let ql = local(e, q);
            let k = e.dofs.len();
            let mut ke = DMatrix::zeros(k, k);
            for g in &e.points {
                let ops = StrainOperators::new(g);
                let (b, _, nm) = self.point_state(&ops, &ql);
                b.add_transpose_product_upper(&mut ke, g.weight, &b.times(&self.d_hat));
                // symmetric: the upper triangle carries the full update
                ops.add_slope_product(&mut ke, g.weight, &nm);
            }
            symmetrize_upper(&mut ke);
            ke
        })
    }

    /// Transverse pressure load `sum R^T f_z` on the w dofs.
    pub fn mechanical_load(&self) -> Vec<f64> {
        let fz = self.pressure;
        self.assemble_vector(|e| {
            let mut fe = vec![0.0; e.dofs.len()];
            for g in &e.points {
                for (a, &r) in g.r.iter().enumerate() {
                    fe[DOFS_PER_POINT * a + Field::W as usize] += g.weight * r * fz;
                }
            }
            fe
        })
    }

    /// Thermal load `sum B_L^T sigma0`.
    pub fn thermal_load(&self) -> Vec<f64> {
        self.assemble_vector(|e| {
            let mut fe = vec![0.0; e.dofs.len()];
            for g in &e.points {
                StrainOperators::new(g).add_transpose_vector(&mut fe, g.weight, &self.sigma0);
            }
            fe
        })
    }

    /// `F = F_th + F_mech`.
    pub fn load(&self) -> Vec<f64> {
        let mut f = self.thermal_load();
        for (fi, m) in f.iter_mut().zip(self.mechanical_load()) {
            *fi += m;
        }
        f
    }

    /// `sum (B_L + B_NL)^T (D eps - sigma0)` with
    /// `eps = (B_L + 1/2 B_NL) q`.
    pub fn internal_force(&self, q: &[f64]) -> Vec<f64> {
        self.assemble_vector(|e| {
            let ql = local(e, q);
            let mut fe = vec![0.0; e.dofs.len()];
            for g in &e.points {
                let ops = StrainOperators::new(g);
                let (b, stress, _) = self.point_state(&ops, &ql);
                b.add_transpose_vector(&mut fe, g.weight, &stress);
            }
            fe
        })
    }

    /// Equilibrium residual `phi(q) = (K_L + K_NL - K_0) q - F`.
    pub fn residual(&self, q: &[f64]) -> Vec<f64> {
        let mut r = self.internal_force(q);
        for (ri, m) in r.iter_mut().zip(self.mechanical_load()) {
            *ri -= m;
        }
        r
    }

    /// Returns `(B_L + B_NL, D eps - sigma0, membrane force matrix)`.
    fn point_state(
        &self,
        ops: &StrainOperators,
        ql: &[f64],
    ) -> (StrainOperators, Strain, Matrix2<f64>) {
        let slope = ops.slope(ql);
        let eps = ops.plus_nonlinear(slope, 0.5).apply(ql);
        let stress = self.d_hat * eps - self.sigma0;
        let nm = Matrix2::new(stress[0], stress[2], stress[2], stress[1]);
        (ops.plus_nonlinear(slope, 1.0), stress, nm)
    }

    fn assemble_matrix<F>(&self, element: F) -> SparseMatrix
    where
        F: Fn(&ElementData) -> DMatrix<f64> + Sync + Send,
    {
        let blocks: Vec<DMatrix<f64>> = self.mesh.elements.par_iter().map(element).collect();
        let mut k = self.mesh.empty_matrix();
        for (e, ke) in self.mesh.elements.iter().zip(&blocks) {
            k.add_at(&e.positions, ke.as_slice());
        }
        k
    }

    fn assemble_vector<F>(&self, element: F) -> Vec<f64>
    where
        F: Fn(&ElementData) -> Vec<f64> + Sync + Send,
    {
        let blocks: Vec<Vec<f64>> = self.mesh.elements.par_iter().map(element).collect();
        let mut f = vec![0.0; self.n_dofs()];
        for (e, fe) in self.mesh.elements.iter().zip(&blocks) {
            for (&d, &v) in e.dofs.iter().zip(fe) {
                f[d] += v;
            }
        }
        f
    }
}

fn local(e: &ElementData, q: &[f64]) -> Vec<f64> {
    e.dofs.iter().map(|&d| q[d]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::{build_mesh, DofMap};
    use crate::materials::{lookup, FgmSection};
    use crate::splines::shapes;

    fn fgm_system(lx: f64, p: usize, refine: usize) -> PlateSystem {
        let mesh = build_mesh(
            &shapes::rectangle(lx, 0.7 * lx, 1, p).unwrap(),
            (refine, refine),
        )
        .unwrap();
        let sec = FgmSection::new(
            lookup("Al2O3").unwrap(),
            lookup("Al").unwrap(),
            2.0,
            0.05 * lx,
        )
        .unwrap();
        let c = sec.stiffness_with(|_| Ok(300.0)).unwrap();
        let th = sec
            .thermal_resultants_with(|_| Ok(300.0), |z| Ok(40.0 + 200.0 * z / sec.thickness))
            .unwrap();
        PlateSystem::new(mesh, &c, th, -2.0e5)
    }

    fn field_vector(mesh: &Mesh, f: impl Fn(f64, f64) -> [f64; 5]) -> Vec<f64> {
        field_vector_sq(mesh, |x, y, _| f(x, y))
    }

    /// Like `field_vector`, also passing the control value that reproduces
    /// `x^2` on an axis-aligned rectangle with its corner at the origin.
    fn field_vector_sq(mesh: &Mesh, f: impl Fn(f64, f64, f64) -> [f64; 5]) -> Vec<f64> {
        let map = DofMap::new(mesh.surface.n_control_points());
        let (nu, _) = mesh.surface.net_size();
        let sq = mesh.surface.knots_u().square_coefficients();
        let lx = mesh.surface.control_points()[nu - 1][0];
        let mut q = vec![0.0; map.n_dofs()];
        for (a, p) in mesh.surface.control_points().iter().enumerate() {
            let v = f(p[0], p[1], lx * lx * sq[a % nu]);
            for (k, fld) in Field::ALL.iter().enumerate() {
                q[map.dof(a, *fld)] = v[k];
            }
        }
        q
    }

    fn pseudo_random(n: usize, scale: f64) -> Vec<f64> {
        (0..n)
            .map(|i| scale * (((i as f64 + 1.0) * 12.9898).sin() * 43758.5453).fract())
            .collect()
    }

    fn quad_form(k: &SparseMatrix, q: &[f64]) -> f64 {
        crate::linalg::dot(q, &k.mul_vec(q))
    }

    #[test]
    fn rigid_modes_span_nullspace() {
        let s = fgm_system(1.0, 3, 1);
        let k = s.linear_stiffness();
        let modes: Vec<Vec<f64>> = vec![
            field_vector(s.mesh(), |_, _| [1.0, 0.0, 0.0, 0.0, 0.0]),
            field_vector(s.mesh(), |_, _| [0.0, 1.0, 0.0, 0.0, 0.0]),
            field_vector(s.mesh(), |_, _| [0.0, 0.0, 1.0, 0.0, 0.0]),
            field_vector(s.mesh(), |x, _| [0.0, 0.0, x, 0.0, 0.0]),
            field_vector(s.mesh(), |_, y| [0.0, 0.0, y, 0.0, 0.0]),
            field_vector(s.mesh(), |x, y| [-y, x, 0.0, 0.0, 0.0]),
        ];
        let scale = k.frobenius_norm();
        for m in &modes {
            let r = crate::linalg::norm(&k.mul_vec(m));
            assert!(r < 1e-10 * scale, "rigid mode residual {r}");
        }
        let eig = nalgebra::SymmetricEigen::new(k.to_dense());
        let max = eig.eigenvalues.amax();
        let zeros = eig
            .eigenvalues
            .iter()
            .filter(|l| l.abs() < 1e-10 * max)
            .count();
        assert_eq!(zeros, 6);
    }

    #[test]
    fn energies_match_constitutive_oracle() {
        let s = fgm_system(1.0, 2, 2);
        let k = s.linear_stiffness();
        let area = 0.7;
        let d = *s.d_hat();
        // membrane: u = a x + b y, v = c x + d y.
        let (a, b, c, dd) = (1.0e-3, -2.0e-3, 0.5e-3, 3.0e-3);
        let q = field_vector(s.mesh(), |x, y| {
            [a * x + b * y, c * x + dd * y, 0.0, 0.0, 0.0]
        });
        let mut eps = Strain::zeros();
        eps[0] = a;
        eps[1] = dd;
        eps[2] = b + c;
        let expect = (eps.transpose() * d * eps)[0] * area;
        assert!((quad_form(&k, &q) - expect).abs() < 1e-10 * expect.abs());
        // bending: w = x^2/2 + x y, kappa1 = -(1, 0, 2).
        let q = field_vector_sq(s.mesh(), |x, y, xx| [0.0, 0.0, 0.5 * xx + x * y, 0.0, 0.0]);
        let mut eps = Strain::zeros();
        eps[3] = -1.0;
        eps[5] = -2.0;
        let expect = (eps.transpose() * d * eps)[0] * area;
        assert!((quad_form(&k, &q) - expect).abs() < 1e-9 * expect.abs());
        // constant rotations: shear only.
        let q = field_vector(s.mesh(), |_, _| [0.0, 0.0, 0.0, 1.0, -0.5]);
        let mut eps = Strain::zeros();
        eps[9] = 1.0;
        eps[10] = -0.5;
        let expect = (eps.transpose() * d * eps)[0] * area;
        assert!((quad_form(&k, &q) - expect).abs() < 1e-10 * expect.abs());
    }

    #[test]
    fn unit_prestress_is_laplacian_form() {
        let mesh = build_mesh(&shapes::rectangle(1.0, 1.0, 1, 2).unwrap(), (3, 3)).unwrap();
        let sec = FgmSection::homogeneous(lookup("Al").unwrap(), 0.01).unwrap();
        let c = sec.stiffness_with(|_| Ok(300.0)).unwrap();
        let s = PlateSystem::new(mesh, &c, ThermalResultants::default(), 0.0);
        let k0 = s.initial_stress([1.0, 1.0, 0.0]);
        let q = field_vector(s.mesh(), |x, y| [0.0, 0.0, x * y, 0.0, 0.0]);
        assert!((quad_form(&k0, &q) - 2.0 / 3.0).abs() < 1e-12);
        let kxy = s.initial_stress([0.0, 0.0, 1.0]);
        // 2 * int w_x w_y = 2 * int x y = 1/2
        assert!((quad_form(&kxy, &q) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn pressure_load_sums_to_total_force() {
        let s = fgm_system(1.3, 3, 3);
        let f = s.mechanical_load();
        let map = DofMap::new(s.mesh().surface.n_control_points());
        let total: f64 = map.extract(&f, Field::W).iter().sum();
        let expect = -2.0e5 * 1.3 * 0.7 * 1.3;
        assert!((total - expect).abs() < 1e-9 * expect.abs());
    }

    #[test]
    fn residual_matches_secant_form() {
        let s = fgm_system(1.0, 2, 2);
        let q = pseudo_random(s.n_dofs(), 1e-3);
        let kl = s.linear_stiffness();
        let knl = s.nonlinear_stiffness(&q);
        let k0 = s.thermal_initial_stress();
        let f = s.load();
        let lhs = kl.add_scaled(&knl, 1.0).add_scaled(&k0, -1.0).mul_vec(&q);
        let r = s.residual(&q);
        let scale = crate::linalg::norm(&f);
        for i in 0..r.len() {
            assert!((r[i] - (lhs[i] - f[i])).abs() < 1e-9 * scale, "dof {i}");
        }
    }

    #[test]
    fn tangent_matches_finite_differences() {
        let s = fgm_system(1.0, 2, 2);
        let q = pseudo_random(s.n_dofs(), 2e-3);
        let kt = s.tangent_stiffness(&q).to_dense();
        let h = 1e-7;
        let scale = kt.amax();
        for j in (0..s.n_dofs()).step_by(7) {
            let mut qp = q.clone();
            let mut qm = q.clone();
            qp[j] += h;
            qm[j] -= h;
            let rp = s.residual(&qp);
            let rm = s.residual(&qm);
            for i in 0..s.n_dofs() {
                let fd = (rp[i] - rm[i]) / (2.0 * h);
                assert!(
                    (fd - kt[(i, j)]).abs() < 1e-6 * scale,
                    "({i}, {j}): {fd} vs {}",
                    kt[(i, j)]
                );
            }
        }
    }

    #[test]
    fn symmetric_operators() {
        let s = fgm_system(1.0, 3, 2);
        let q = pseudo_random(s.n_dofs(), 1e-3);
        for (name, k) in [
            ("K_L", s.linear_stiffness()),
            ("K_0", s.thermal_initial_stress()),
            ("K_g", s.geometric_stiffness(&q)),
            ("K_T", s.tangent_stiffness(&q)),
        ] {
            assert!(k.asymmetry() < 1e-12, "{name} asymmetry {}", k.asymmetry());
        }
        assert!(s.nonlinear_stiffness(&q).asymmetry() > 1e-6);
    }

    #[test]
    fn tangent_at_rest_is_linear_minus_prestress() {
        let s = fgm_system(1.0, 2, 2);
        let zero = vec![0.0; s.n_dofs()];
        let kt = s.tangent_stiffness(&zero);
        let expect = s
            .linear_stiffness()
            .add_scaled(&s.thermal_initial_stress(), -1.0);
        let diff = kt.add_scaled(&expect, -1.0).frobenius_norm();
        assert!(diff < 1e-12 * expect.frobenius_norm());
    }
}
