use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::discretization::{Field, Reduction, DOFS_PER_POINT};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm, SparseMatrix};

/// Subspace-iteration settings for `A x = lambda B x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EigenConfig {
    pub subspace: usize,
    pub max_iterations: usize,
    /// Relative change of the eigenvalue between sweeps.
    pub tolerance: f64,
    /// Required `||(A - lambda B) x|| / ||A x||`.
    pub residual_tolerance: f64,
}

impl Default for EigenConfig {
    fn default() -> Self {
        Self {
            subspace: 8,
            max_iterations: 400,
            tolerance: 1e-13,
            residual_tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Smallest positive `lambda` of `A x = lambda B x` with `A` symmetric
/// positive definite and `B` symmetric, by inverse subspace iteration
/// (zero shift) with Rayleigh-Ritz projection.
pub fn smallest_positive_eigenpair(
    a: &SparseMatrix,
    b: &SparseMatrix,
    config: &EigenConfig,
) -> Result<EigenPair> {
    seeded_eigenpair(a, b, config, None)
}

/// As [`smallest_positive_eigenpair`], with `seed` (an approximate mode)
/// replacing the first start vector.
pub(crate) fn seeded_eigenpair(
    a: &SparseMatrix,
    b: &SparseMatrix,
    config: &EigenConfig,
    seed: Option<&[f64]>,
) -> Result<EigenPair> {
    let n = a.dim();
    if n == 0 || b.dim() != n {
        return Err(Error::Eigen(format!(
            "dimension mismatch: {} vs {}",
            n,
            b.dim()
        )));
    }
    let fact = a.factorize()?;
    if !fact.is_positive_definite() {
        return Err(Error::Eigen(
            "stiffness is not positive definite on the free dofs".into(),
        ));
    }
    let mut x = start_vectors(a, b, config.subspace.clamp(1, n));
    if let Some(v) = seed.filter(|v| v.len() == n && norm(v) > 0.0) {
        x[0] = v.to_vec();
    }
    let mut last = f64::NAN;
    for iter in 1..=config.max_iterations {
        let m = x.len();
        // Y = A^-1 B X
        let bx: Vec<Vec<f64>> = x.iter().map(|c| b.mul_vec(c)).collect();
        let y: Vec<Vec<f64>> = bx.iter().map(|c| fact.solve(c)).collect::<Result<_>>()?;
        let by: Vec<Vec<f64>> = y.iter().map(|c| b.mul_vec(c)).collect();
        // A Y = B X, so Y^T A Y = Y^T B X.
        let ar = DMatrix::from_fn(m, m, |i, j| 0.5 * (dot(&y[i], &bx[j]) + dot(&y[j], &bx[i])));
        let br = DMatrix::from_fn(m, m, |i, j| 0.5 * (dot(&y[i], &by[j]) + dot(&y[j], &by[i])));
        let (mu, z) = projected_pencil(ar, br)?;
        // reorder descending in mu: largest positive mu = smallest positive lambda
        let mut order: Vec<usize> = (0..mu.len()).collect();
        order.sort_by(|&i, &j| mu[j].total_cmp(&mu[i]));
        x = order
            .iter()
            .map(|&k| {
                let mut v = vec![0.0; n];
                for (col, yc) in y.iter().enumerate() {
                    let c = z[(col, k)];
                    for (vi, yi) in v.iter_mut().zip(yc) {
                        *vi += c * yi;
                    }
                }
                v
            })
            .collect();
        let top = mu[order[0]];
        if !(top > 0.0) {
            return Err(Error::Eigen(
                "no positive eigenvalue: the reference state does not destabilize the plate".into(),
            ));
        }
        let lambda = 1.0 / top;
        let converged = (lambda - last).abs() <= config.tolerance * lambda.abs();
        last = lambda;
        if converged || iter == config.max_iterations {
            let mut v = x[0].clone();
            let s = norm(&v);
            v.iter_mut().for_each(|c| *c /= s);
            let residual = pencil_residual(a, b, lambda, &v);
            if residual < config.residual_tolerance {
                return Ok(EigenPair {
                    value: lambda,
                    vector: v,
                    residual,
                    iterations: iter,
                });
            }
            if iter == config.max_iterations {
                return Err(Error::Eigen(format!(
                    "subspace iteration stalled after {iter} sweeps with residual {residual:.3e}"
                )));
            }
        }
    }
    unreachable!("loop returns on the final sweep")
}

/// `||(A - lambda B) x|| / ||A x||`.
fn pencil_residual(a: &SparseMatrix, b: &SparseMatrix, lambda: f64, x: &[f64]) -> f64 {
    let ax = a.mul_vec(x);
    let bx = b.mul_vec(x);
    let r: Vec<f64> = ax.iter().zip(&bx).map(|(p, q)| p - lambda * q).collect();
    norm(&r) / norm(&ax)
}

/// Solves `B z = mu A z` for symmetric positive semidefinite `A`; columns
/// of `z` are A-orthonormal. Directions where `A` is numerically singular
/// (a subspace wider than the range of `B`) are dropped.
fn projected_pencil(ar: DMatrix<f64>, br: DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let ea = SymmetricEigen::new(ar);
    let top = ea.eigenvalues.amax();
    let keep: Vec<usize> = (0..ea.eigenvalues.len())
        .filter(|&i| ea.eigenvalues[i] > 1e-12 * top)
        .collect();
    if keep.is_empty() {
        return Err(Error::Eigen("projected stiffness vanished".into()));
    }
    let m = ea.eigenvalues.len();
    let t = DMatrix::from_fn(m, keep.len(), |i, k| {
        ea.eigenvectors[(i, keep[k])] / ea.eigenvalues[keep[k]].sqrt()
    });
    let c = t.transpose() * br * &t;
    let c = 0.5 * (&c + c.transpose());
    let eig = SymmetricEigen::new(c);
    let z = t * eig.eigenvectors;
    Ok((eig.eigenvalues.iter().copied().collect(), z))
}

/// Starting subspace: the diagonal of `B`, unit vectors at the largest
/// `|B_ii / A_ii|`, and one deterministic pseudo-random vector.
fn start_vectors(a: &SparseMatrix, b: &SparseMatrix, m: usize) -> Vec<Vec<f64>> {
    let n = a.dim();
    let diag_b: Vec<f64> = (0..n).map(|i| b.get(i, i)).collect();
    let mut ratio: Vec<(usize, f64)> = (0..n)
        .map(|i| {
            let ai = a.get(i, i);
            (
                i,
                if ai != 0.0 {
                    (diag_b[i] / ai).abs()
                } else {
                    0.0
                },
            )
        })
        .collect();
    ratio.sort_by(|p, q| q.1.total_cmp(&p.1).then(p.0.cmp(&q.0)));
    let mut x = Vec::with_capacity(m);
    if diag_b.iter().any(|&v| v != 0.0) {
        x.push(diag_b.iter().map(|v| v.abs()).collect());
    } else {
        x.push(vec![1.0; n]);
    }
    let mut k = 0;
    while x.len() + 1 < m && k < n {
        let mut e = vec![0.0; n];
        e[ratio[k].0] = 1.0;
        x.push(e);
        k += 1;
    }
    if x.len() < m {
        x.push(
            (0..n)
                .map(|i| (((i as f64 + 1.0) * 12.9898).sin() * 43758.5453).fract())
                .collect(),
        );
    }
    x
}

/// Critical load factor and mode of `(K_L - lambda K_0) q = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucklingResult {
    pub load_factor: f64,
    /// Unit-norm mode over all dofs, largest-magnitude w component positive.
    pub mode: Vec<f64>,
    /// Critical membrane force `lambda N_ref` (N/m).
    pub critical_force: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Linear buckling on the free dofs. `reference_force` is the magnitude of
/// the membrane prestress that generated `k_0` (1 for a unit force).
pub fn solve_linear_buckling(
    k_l: &SparseMatrix,
    k_0: &SparseMatrix,
    reduction: &Reduction,
    reference_force: f64,
    config: &EigenConfig,
) -> Result<BucklingResult> {
    seeded_buckling(k_l, k_0, reduction, reference_force, config, None)
}

pub(crate) fn seeded_buckling(
    k_l: &SparseMatrix,
    k_0: &SparseMatrix,
    reduction: &Reduction,
    reference_force: f64,
    config: &EigenConfig,
    seed: Option<&[f64]>,
) -> Result<BucklingResult> {
    let a = reduction.matrix(k_l);
    let b = reduction.matrix(k_0);
    let seed = seed.map(|v| reduction.vector(v));
    let pair = seeded_eigenpair(&a, &b, config, seed.as_deref())?;
    let mut mode = reduction.expand(&pair.vector);
    orient_mode(&mut mode);
    Ok(BucklingResult {
        load_factor: pair.value,
        mode,
        critical_force: pair.value * reference_force,
        residual: pair.residual,
        iterations: pair.iterations,
    })
}

/// Unit norm with the largest-magnitude w component positive.
pub(crate) fn orient_mode(mode: &mut [f64]) {
    let s = norm(mode);
    if s > 0.0 {
        mode.iter_mut().for_each(|v| *v /= s);
    }
    let w = Field::W as usize;
    let peak = mode
        .iter()
        .enumerate()
        .filter(|(i, _)| i % DOFS_PER_POINT == w)
        .fold(
            0.0_f64,
            |best, (_, &v)| if v.abs() > best.abs() { v } else { best },
        );
    if peak < 0.0 {
        mode.iter_mut().for_each(|v| *v = -*v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiag(n: usize, d: f64, o: f64) -> SparseMatrix {
        let rows = (0..n)
            .map(|i| (i.saturating_sub(1)..(i + 2).min(n)).collect())
            .collect();
        let mut m = SparseMatrix::with_pattern(n, rows);
        for i in 0..n {
            m.add(i, i, d);
            if i + 1 < n {
                m.add(i, i + 1, o);
                m.add(i + 1, i, o);
            }
        }
        m
    }

    #[test]
    fn discrete_laplacian_against_closed_form() {
        // A = tridiag(-1, 2, -1), B = I: lambda_k = 2 - 2 cos(k pi / (n + 1)).
        let n = 60;
        let a = tridiag(n, 2.0, -1.0);
        let b = tridiag(n, 1.0, 0.0);
        let p = smallest_positive_eigenpair(&a, &b, &EigenConfig::default()).unwrap();
        let exact = 2.0 - 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
        assert!((p.value - exact).abs() < 1e-12 * exact);
        assert!(p.residual < 1e-8);
    }

    #[test]
    fn indefinite_b_picks_positive_branch() {
        // diagonal pencil with eigenvalues {-0.5, 2, 3, ...}
        let n = 12;
        let a = tridiag(n, 1.0, 0.0);
        let mut b = tridiag(n, 0.0, 0.0);
        b.add(0, 0, -2.0);
        b.add(1, 1, 0.5);
        for i in 2..n {
            b.add(i, i, 1.0 / (i as f64 + 1.0));
        }
        let p = smallest_positive_eigenpair(&a, &b, &EigenConfig::default()).unwrap();
        assert!((p.value - 2.0).abs() < 1e-12);
        assert!(p.vector[1].abs() > 1.0 - 1e-12);
    }

    #[test]
    fn no_positive_eigenvalue() {
        let a = tridiag(5, 2.0, -1.0);
        let b = tridiag(5, -1.0, 0.0);
        assert!(matches!(
            smallest_positive_eigenpair(&a, &b, &EigenConfig::default()),
            Err(Error::Eigen(_))
        ));
    }

    #[test]
    fn mode_orientation() {
        let mut m = vec![0.0, 0.0, -3.0, 0.0, 0.0, 9.0, 0.0, 1.0, 0.0, 0.0];
        orient_mode(&mut m);
        assert!(m[2] > 0.0);
        assert!((norm(&m) - 1.0).abs() < 1e-15);
    }
}
