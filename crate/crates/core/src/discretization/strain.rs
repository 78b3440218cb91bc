use nalgebra::{DMatrix, SMatrix, SVector, Vector2};

use super::dofs::{Field, DOFS_PER_POINT};
use super::mesh::GaussPoint;

pub type Strain = SVector<f64, 11>;
pub type Constitutive = SMatrix<f64, 11, 11>;

const MAX_NZ: usize = 6;

/// Column-sparse strain-displacement operator at a Gauss point, acting on
/// the element dof vector. The 11 generalized strain rows are
/// `(eps0 [3], kappa1 [3], kappa2 [3], gamma [2])` with
/// `kappa1 = -(w_xx, w_yy, 2 w_xy)` and `kappa2` the gradient of the
/// rotations. Every column has at most six nonzeros.
#[derive(Debug, Clone)]
pub struct StrainOperators {
    rows: Vec<[u8; MAX_NZ]>,
    vals: Vec<[f64; MAX_NZ]>,
    len: Vec<u8>,
    /// Slope operator `(w_x, w_y) = B_g q`, per local function.
    rx: Vec<f64>,
    ry: Vec<f64>,
}

const U: usize = Field::U as usize;
const V: usize = Field::V as usize;
const W: usize = Field::W as usize;
const BX: usize = Field::BetaX as usize;
const BY: usize = Field::BetaY as usize;

impl StrainOperators {
    /// The linear operator `B_L`.
    pub fn new(g: &GaussPoint) -> Self {
        let nf = g.r.len();
        let n = nf * DOFS_PER_POINT;
        let mut s = Self {
            rows: vec![[0; MAX_NZ]; n],
            vals: vec![[0.0; MAX_NZ]; n],
            len: vec![0; n],
            rx: g.rx.clone(),
            ry: g.ry.clone(),
        };
        for a in 0..nf {
            let c = DOFS_PER_POINT * a;
            let (r, rx, ry) = (g.r[a], g.rx[a], g.ry[a]);
            s.push(c + U, 0, rx);
            s.push(c + U, 2, ry);
            s.push(c + V, 1, ry);
            s.push(c + V, 2, rx);
            s.push(c + W, 3, -g.rxx[a]);
            s.push(c + W, 4, -g.ryy[a]);
            s.push(c + W, 5, -2.0 * g.rxy[a]);
            s.push(c + BX, 6, rx);
            s.push(c + BX, 8, ry);
            s.push(c + BX, 9, r);
            s.push(c + BY, 7, ry);
            s.push(c + BY, 8, rx);
            s.push(c + BY, 10, r);
        }
        s
    }

    fn push(&mut self, col: usize, row: u8, val: f64) {
        let k = self.len[col] as usize;
        self.rows[col][k] = row;
        self.vals[col][k] = val;
        self.len[col] += 1;
    }

    pub fn ncols(&self) -> usize {
        self.len.len()
    }

    fn n_functions(&self) -> usize {
        self.rx.len()
    }

    #[inline]
    fn column(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let k = self.len[j] as usize;
        self.rows[j][..k]
            .iter()
            .zip(&self.vals[j][..k])
            .map(|(&r, &v)| (r as usize, v))
    }

    pub fn slope(&self, q_local: &[f64]) -> Vector2<f64> {
        let mut s = Vector2::zeros();
        for a in 0..self.n_functions() {
            let w = q_local[DOFS_PER_POINT * a + W];
            s[0] += self.rx[a] * w;
            s[1] += self.ry[a] * w;
        }
        s
    }

    /// `B_NL = [A_theta; 0] B_g` with `A_theta = [[wx, 0], [0, wy], [wy, wx]]`.
    pub fn nonlinear(&self, slope: Vector2<f64>) -> Self {
        let n = self.ncols();
        let mut s = Self {
            rows: vec![[0; MAX_NZ]; n],
            vals: vec![[0.0; MAX_NZ]; n],
            len: vec![0; n],
            rx: self.rx.clone(),
            ry: self.ry.clone(),
        };
        s.add_nonlinear(slope, 1.0);
        s
    }

    /// `B_L + c B_NL`.
    pub fn plus_nonlinear(&self, slope: Vector2<f64>, c: f64) -> Self {
        let mut s = self.clone();
        s.add_nonlinear(slope, c);
        s
    }

    fn add_nonlinear(&mut self, slope: Vector2<f64>, c: f64) {
        let (wx, wy) = (c * slope[0], c * slope[1]);
        for a in 0..self.n_functions() {
            let col = DOFS_PER_POINT * a + W;
            let (gx, gy) = (self.rx[a], self.ry[a]);
            self.push(col, 0, wx * gx);
            self.push(col, 1, wy * gy);
            self.push(col, 2, wy * gx + wx * gy);
        }
    }

    pub fn dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(11, self.ncols());
        for j in 0..self.ncols() {
            for (r, v) in self.column(j) {
                m[(r, j)] += v;
            }
        }
        m
    }

    /// `B q`.
    pub fn apply(&self, q_local: &[f64]) -> Strain {
        let mut e = Strain::zeros();
        for (j, &qj) in q_local.iter().enumerate() {
            if qj != 0.0 {
                for (r, v) in self.column(j) {
                    e[r] += v * qj;
                }
            }
        }
        e
    }

    /// Columns of `D B`.
    pub fn times(&self, d: &Constitutive) -> Vec<Strain> {
        (0..self.ncols())
            .map(|j| {
                let mut c = Strain::zeros();
                for (r, v) in self.column(j) {
                    c += d.column(r) * v;
                }
                c
            })
            .collect()
    }

    #[inline]
    fn column_dot(&self, i: usize, m: &[f64]) -> f64 {
        let l = self.len[i] as usize;
        let (rows, vals) = (&self.rows[i], &self.vals[i]);
        let mut s = 0.0;
        for k in 0..l {
            s += vals[k] * m[rows[k] as usize];
        }
        s
    }

    /// `ke += w B^T M` with `M` given by columns.
    pub fn add_transpose_product(&self, ke: &mut DMatrix<f64>, w: f64, m: &[Strain]) {
        let n = ke.nrows();
        let data = ke.as_mut_slice();
        for (j, mj) in m.iter().enumerate() {
            if mj.iter().all(|&x| x == 0.0) {
                continue;
            }
            let mj = mj.as_slice();
            let col = &mut data[j * n..(j + 1) * n];
            for (i, c) in col.iter_mut().enumerate().take(self.ncols()) {
                if self.len[i] > 0 {
                    *c += w * self.column_dot(i, mj);
                }
            }
        }
    }

    /// Upper triangle of `ke += w B^T M` for symmetric products.
    pub fn add_transpose_product_upper(&self, ke: &mut DMatrix<f64>, w: f64, m: &[Strain]) {
        let n = ke.nrows();
        let data = ke.as_mut_slice();
        for (j, mj) in m.iter().enumerate() {
            let mj = mj.as_slice();
            let col = &mut data[j * n..j * n + j + 1];
            for (i, c) in col.iter_mut().enumerate() {
                *c += w * self.column_dot(i, mj);
            }
        }
    }

    /// `fe += w B^T s`.
    pub fn add_transpose_vector(&self, fe: &mut [f64], w: f64, s: &Strain) {
        for (i, f) in fe.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (r, v) in self.column(i) {
                acc += v * s[r];
            }
            *f += w * acc;
        }
    }

    /// `ke += w B_g^T N B_g`, touching only the w dofs.
    pub fn add_slope_product(&self, ke: &mut DMatrix<f64>, w: f64, n: &nalgebra::Matrix2<f64>) {
        let nf = self.n_functions();
        for a in 0..nf {
            let ia = DOFS_PER_POINT * a + W;
            let na0 = n[(0, 0)] * self.rx[a] + n[(0, 1)] * self.ry[a];
            let na1 = n[(1, 0)] * self.rx[a] + n[(1, 1)] * self.ry[a];
            for b in 0..nf {
                let ib = DOFS_PER_POINT * b + W;
                ke[(ib, ia)] += w * (self.rx[b] * na0 + self.ry[b] * na1);
            }
        }
    }
}

/// Mirrors the upper triangle into the lower one.
pub(crate) fn symmetrize_upper(ke: &mut DMatrix<f64>) {
    let n = ke.nrows();
    for j in 0..n {
        for i in j + 1..n {
            ke[(i, j)] = ke[(j, i)];
        }
    }
}
