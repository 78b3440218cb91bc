use serde::{Deserialize, Serialize};

use super::dofs::{DofMap, Field};
use super::mesh::Mesh;
use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;

/// Edge support. "x-edges" are the patch edges xi = 0 and xi = 1, "y-edges"
/// are eta = 0 and eta = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryCondition {
    /// x-edges: v, w, beta_y fixed. y-edges: u, w, beta_x fixed.
    #[serde(rename = "SSSS1")]
    Ssss1,
    /// x-edges: u, v, w, beta_y fixed. y-edges: u, v, w, beta_x fixed.
    #[serde(rename = "SSSS2")]
    Ssss2,
    /// u, v, w fixed on every edge.
    #[serde(rename = "SSSS3")]
    Ssss3,
    /// Every dof on the boundary ring, plus w on the adjacent ring of
    /// control points to suppress the normal slope.
    #[serde(rename = "CCCC", alias = "clamped", alias = "Clamped")]
    Clamped,
}

impl BoundaryCondition {
    fn x_edge(self) -> &'static [Field] {
        match self {
            Self::Ssss1 => &[Field::V, Field::W, Field::BetaY],
            Self::Ssss2 => &[Field::U, Field::V, Field::W, Field::BetaY],
            Self::Ssss3 => &[Field::U, Field::V, Field::W],
            Self::Clamped => &Field::ALL,
        }
    }

    fn y_edge(self) -> &'static [Field] {
        match self {
            Self::Ssss1 => &[Field::U, Field::W, Field::BetaX],
            Self::Ssss2 => &[Field::U, Field::V, Field::W, Field::BetaX],
            Self::Ssss3 => &[Field::U, Field::V, Field::W],
            Self::Clamped => &Field::ALL,
        }
    }
}

/// Sorted list of prescribed (zero) dofs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSet {
    pub condition: BoundaryCondition,
    fixed: Vec<usize>,
}

impl ConstraintSet {
    pub fn new(mesh: &Mesh, condition: BoundaryCondition) -> Result<Self> {
        let (nu, nv) = mesh.surface.net_size();
        if condition == BoundaryCondition::Clamped && (nu < 4 || nv < 4) {
            return Err(Error::Boundary(format!(
                "clamped edges need at least 4 x 4 control points, got {nu} x {nv}"
            )));
        }
        let map = mesh.dofs;
        let mut fixed = Vec::new();
        let mut fix = |i: usize, j: usize, fields: &[Field]| {
            for &f in fields {
                fixed.push(map.dof(i + j * nu, f));
            }
        };
        for j in 0..nv {
            for &i in &[0, nu - 1] {
                fix(i, j, condition.x_edge());
            }
        }
        for i in 0..nu {
            for &j in &[0, nv - 1] {
                fix(i, j, condition.y_edge());
            }
        }
        if condition == BoundaryCondition::Clamped {
            for j in 1..nv - 1 {
                fix(1, j, &[Field::W]);
                fix(nu - 2, j, &[Field::W]);
            }
            for i in 1..nu - 1 {
                fix(i, 1, &[Field::W]);
                fix(i, nv - 2, &[Field::W]);
            }
        }
        fixed.sort_unstable();
        fixed.dedup();
        Ok(Self { condition, fixed })
    }

    pub fn fixed(&self) -> &[usize] {
        &self.fixed
    }

    pub fn reduction(&self, dofs: &DofMap) -> Reduction {
        let mut is_fixed = vec![false; dofs.n_dofs()];
        for &d in &self.fixed {
            is_fixed[d] = true;
        }
        let free = (0..dofs.n_dofs()).filter(|&d| !is_fixed[d]).collect();
        Reduction {
            n: dofs.n_dofs(),
            free,
        }
    }
}

/// Elimination of prescribed zero dofs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    n: usize,
    free: Vec<usize>,
}

impl Reduction {
    pub fn free(&self) -> &[usize] {
        &self.free
    }

    pub fn n_free(&self) -> usize {
        self.free.len()
    }

    pub fn n_full(&self) -> usize {
        self.n
    }

    pub fn matrix(&self, k: &SparseMatrix) -> SparseMatrix {
        k.restrict(&self.free)
    }

    pub fn vector(&self, v: &[f64]) -> Vec<f64> {
        self.free.iter().map(|&d| v[d]).collect()
    }

    /// Scatters free values into a full vector with zeros at fixed dofs.
    pub fn expand(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (&d, &x) in self.free.iter().zip(v) {
            out[d] = x;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::build_mesh;
    use crate::splines::shapes;

    fn mesh() -> Mesh {
        build_mesh(&shapes::rectangle(1.0, 1.0, 1, 2).unwrap(), (3, 3)).unwrap()
    }

    #[test]
    fn counts() {
        let m = mesh();
        // 5 x 5 net, 16 boundary points.
        let c1 = ConstraintSet::new(&m, BoundaryCondition::Ssss1).unwrap();
        // 12 edge points with 3 dofs, 4 corners with all 5
        assert_eq!(c1.fixed().len(), 12 * 3 + 4 * 5);
        let c3 = ConstraintSet::new(&m, BoundaryCondition::Ssss3).unwrap();
        assert_eq!(c3.fixed().len(), 16 * 3);
        let cc = ConstraintSet::new(&m, BoundaryCondition::Clamped).unwrap();
        assert_eq!(cc.fixed().len(), 16 * 5 + 8);
    }

    #[test]
    fn ssss1_corner_fixes_all_but_nothing_extra() {
        let m = mesh();
        let c = ConstraintSet::new(&m, BoundaryCondition::Ssss1).unwrap();
        let corner: Vec<usize> = c.fixed().iter().copied().filter(|&d| d < 5).collect();
        assert_eq!(corner, vec![0, 1, 2, 3, 4]);
        let mid_x_edge = 5 * 10;
        let got: Vec<usize> = c
            .fixed()
            .iter()
            .filter(|&&d| d / 5 == 10)
            .map(|d| d % 5)
            .collect();
        assert_eq!(got, vec![1, 2, 4]);
        assert!(!c.fixed().contains(&mid_x_edge));
    }

    #[test]
    fn expand_round_trip() {
        let m = mesh();
        let c = ConstraintSet::new(&m, BoundaryCondition::Ssss2).unwrap();
        let r = c.reduction(&m.dofs);
        let v: Vec<f64> = (0..r.n_free()).map(|i| i as f64 + 1.0).collect();
        let full = r.expand(&v);
        assert_eq!(r.vector(&full), v);
        for &d in c.fixed() {
            assert_eq!(full[d], 0.0);
        }
    }

    #[test]
    fn serde_names() {
        let b: BoundaryCondition = serde_json::from_str("\"SSSS2\"").unwrap();
        assert_eq!(b, BoundaryCondition::Ssss2);
        let c: BoundaryCondition = serde_json::from_str("\"clamped\"").unwrap();
        assert_eq!(c, BoundaryCondition::Clamped);
    }
}
