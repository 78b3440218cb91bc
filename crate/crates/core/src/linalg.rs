//! Compressed sparse row storage for the assembled operators and a thin
//! wrapper over faer's sparse Cholesky / LU factorizations.

use faer::linalg::solvers::SolveCore;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Conj, Mat, Side};
use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Square sparse matrix in CSR form with a fixed sparsity pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Zero matrix with the given per-row column sets (need not be sorted).
    pub fn with_pattern(n: usize, mut rows: Vec<Vec<usize>>) -> Self {
        assert_eq!(rows.len(), n);
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let mut cols = Vec::new();
        for r in rows.iter_mut() {
            r.sort_unstable();
            r.dedup();
            cols.extend_from_slice(r);
            row_ptr.push(cols.len());
        }
        let nnz = cols.len();
        Self {
            n,
            row_ptr,
            cols,
            values: vec![0.0; nnz],
        }
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            values: vec![0.0; self.values.len()],
            ..self.clone()
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    fn position(&self, i: usize, j: usize) -> Option<usize> {
        let row = &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]];
        row.binary_search(&j).ok().map(|k| self.row_ptr[i] + k)
    }

    /// Adds `v` at `(i, j)`; panics if the entry is outside the pattern.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self
            .position(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside sparsity pattern"));
        self.values[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.position(i, j).map_or(0.0, |k| self.values[k])
    }

    /// Scatters a dense element block into the rows/columns `dofs`.
    pub fn add_block(&mut self, dofs: &[usize], block: &DMatrix<f64>) {
        for (a, &i) in dofs.iter().enumerate() {
            let start = self.row_ptr[i];
            let row = &self.cols[start..self.row_ptr[i + 1]];
            for (b, &j) in dofs.iter().enumerate() {
                let v = block[(a, b)];
                if v != 0.0 {
                    let k = start
                        + row
                            .binary_search(&j)
                            .expect("entry outside sparsity pattern");
                    self.values[k] += v;
                }
            }
        }
    }

    /// Value-array positions of the dense block `dofs x dofs`, in
    /// column-major order.
    pub fn block_positions(&self, dofs: &[usize]) -> Vec<usize> {
        let mut out = Vec::with_capacity(dofs.len() * dofs.len());
        for &j in dofs {
            for &i in dofs {
                out.push(self.position(i, j).expect("entry outside sparsity pattern"));
            }
        }
        out
    }

    /// Adds a column-major block at positions from [`Self::block_positions`].
    pub fn add_at(&mut self, positions: &[usize], block: &[f64]) {
        for (&k, &v) in positions.iter().zip(block) {
            self.values[k] += v;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |k| (i, self.cols[k], self.values[k]))
        })
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| {
                (self.row_ptr[i]..self.row_ptr[i + 1])
                    .map(|k| self.values[k] * x[self.cols[k]])
                    .sum()
            })
            .collect()
    }

    /// `self + c * other`; both must share a pattern.
    pub fn add_scaled(&self, other: &SparseMatrix, c: f64) -> SparseMatrix {
        assert!(
            self.row_ptr == other.row_ptr && self.cols == other.cols,
            "add_scaled needs identical sparsity patterns"
        );
        let mut out = self.clone();
        for (a, b) in out.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
        out
    }

    pub fn scaled(&self, c: f64) -> SparseMatrix {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= c);
        out
    }

    /// Transpose; assumes a structurally symmetric pattern.
    pub fn transpose(&self) -> SparseMatrix {
        let mut out = self.zeros_like();
        for (i, j, v) in self.iter() {
            let k = out
                .position(j, i)
                .expect("pattern is not structurally symmetric");
            out.values[k] = v;
        }
        out
    }

    /// `(A + A^T) / 2`.
    pub fn symmetric_part(&self) -> SparseMatrix {
        self.add_scaled(&self.transpose(), 1.0).scaled(0.5)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `||A - A^T||_F / ||A||_F` (0 for the zero matrix).
    pub fn asymmetry(&self) -> f64 {
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            return 0.0;
        }
        self.add_scaled(&self.transpose(), -1.0).frobenius_norm() / norm
    }

    /// Sub-matrix on rows and columns `keep` (sorted ascending).
    pub fn restrict(&self, keep: &[usize]) -> SparseMatrix {
        let mut map = vec![usize::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let mut row_ptr = Vec::with_capacity(keep.len() + 1);
        row_ptr.push(0);
        let mut cols = Vec::new();
        let mut values = Vec::new();
        for &i in keep {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = map[self.cols[k]];
                if j != usize::MAX {
                    cols.push(j);
                    values.push(self.values[k]);
                }
            }
            row_ptr.push(cols.len());
        }
        SparseMatrix {
            n: keep.len(),
            row_ptr,
            cols,
            values,
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (i, j, v) in self.iter() {
            m[(i, j)] += v;
        }
        m
    }

    fn to_faer(&self) -> Result<SparseColMat<usize, f64>> {
        let triplets: Vec<Triplet<usize, usize, f64>> =
            self.iter().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
        SparseColMat::try_new_from_triplets(self.n, self.n, &triplets)
            .map_err(|e| Error::Solver(format!("sparse conversion failed: {e:?}")))
    }

    /// Cholesky factorization, falling back to pivoted LU when the matrix
    /// is not positive definite.
    pub fn factorize(&self) -> Result<Factorization> {
        if self.n == 0 {
            return Err(Error::Solver("empty system".into()));
        }
        let m = self.to_faer()?;
        if let Ok(llt) = m.sp_cholesky(Side::Lower) {
            return Ok(Factorization::Llt(llt));
        }
        let lu = m
            .sp_lu()
            .map_err(|e| Error::Solver(format!("LU factorization failed: {e:?}")))?;
        Ok(Factorization::Lu(lu))
    }
}

/// Factorized sparse matrix.
#[allow(clippy::large_enum_variant)]
pub enum Factorization {
    Llt(faer::sparse::linalg::solvers::Llt<usize, f64>),
    Lu(faer::sparse::linalg::solvers::Lu<usize, f64>),
}

impl std::fmt::Debug for Factorization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Factorization::Llt(_) => "Factorization::Llt",
            Factorization::Lu(_) => "Factorization::Lu",
        })
    }
}

impl Factorization {
    pub fn is_positive_definite(&self) -> bool {
        matches!(self, Factorization::Llt(_))
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let mut rhs = Mat::<f64>::from_fn(b.len(), 1, |i, _| b[i]);
        match self {
            Factorization::Llt(f) => f.solve_in_place_with_conj(Conj::No, rhs.as_mut()),
            Factorization::Lu(f) => f.solve_in_place_with_conj(Conj::No, rhs.as_mut()),
        }
        let x: Vec<f64> = (0..b.len()).map(|i| rhs[(i, 0)]).collect();
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Solver(
                "singular matrix (non-finite solution)".into(),
            ));
        }
        Ok(x)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
