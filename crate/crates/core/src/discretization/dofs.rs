/// Unknowns per control point: `(u0, v0, w0, beta_x, beta_y)`.
pub const DOFS_PER_POINT: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    U = 0,
    V = 1,
    W = 2,
    BetaX = 3,
    BetaY = 4,
}

impl Field {
    pub const ALL: [Field; 5] = [Field::U, Field::V, Field::W, Field::BetaX, Field::BetaY];
}

/// Interleaved numbering: control point `A` owns dofs `5A .. 5A + 5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DofMap {
    n_points: usize,
}

impl DofMap {
    pub fn new(n_points: usize) -> Self {
        Self { n_points }
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn n_dofs(&self) -> usize {
        DOFS_PER_POINT * self.n_points
    }

    #[inline]
    pub fn dof(&self, point: usize, field: Field) -> usize {
        DOFS_PER_POINT * point + field as usize
    }

    /// Values of one field across all control points.
    pub fn extract(&self, q: &[f64], field: Field) -> Vec<f64> {
        (0..self.n_points).map(|a| q[self.dof(a, field)]).collect()
    }
}
