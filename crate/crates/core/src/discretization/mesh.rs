use rayon::prelude::*;

use super::dofs::{DofMap, DOFS_PER_POINT};
use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;
use crate::quadrature::gauss_on;
use crate::splines::{refine_knots, NurbsSurface};

/// Basis data at one Gauss point. Arrays are indexed by the local function
/// number of the owning element.
#[derive(Debug, Clone)]
pub struct GaussPoint {
    pub xi: f64,
    pub eta: f64,
    pub r: Vec<f64>,
    pub rx: Vec<f64>,
    pub ry: Vec<f64>,
    pub rxx: Vec<f64>,
    pub ryy: Vec<f64>,
    pub rxy: Vec<f64>,
    /// Quadrature weight times the Jacobian determinant.
    pub weight: f64,
}

/// One non-empty knot span of the patch.
#[derive(Debug, Clone)]
pub struct ElementData {
    pub control_points: Vec<usize>,
    pub dofs: Vec<usize>,
    pub bounds: [f64; 4],
    pub points: Vec<GaussPoint>,
    /// Positions of the element block in the global value array.
    pub positions: Vec<usize>,
}

/// Elements, Gauss data and the sparsity pattern of a NURBS plate patch.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub surface: NurbsSurface,
    pub dofs: DofMap,
    pub elements: Vec<ElementData>,
    pattern: SparseMatrix,
}

/// Refines `surface` and sets up a (p+1) x (q+1) Gauss rule per element.
/// Degrees below 2 are rejected: bending strains need second derivatives
/// of the deflection.
pub fn build_mesh(surface: &NurbsSurface, refinement: (usize, usize)) -> Result<Mesh> {
    let (p, q) = surface.degrees();
    if p < 2 || q < 2 {
        return Err(Error::Config(format!(
            "plate discretization needs degree >= 2 in both directions, got ({p}, {q})"
        )));
    }
    let surface = refine_knots(surface, refinement)?;
    Mesh::new(surface)
}

impl Mesh {
    pub fn new(surface: NurbsSurface) -> Result<Self> {
        let (p, q) = surface.degrees();
        let spans_u = surface.knots_u().spans();
        let spans_v = surface.knots_v().spans();
        let cells: Vec<[f64; 4]> = spans_v
            .iter()
            .flat_map(|&(_, v0, v1)| spans_u.iter().map(move |&(_, u0, u1)| [u0, u1, v0, v1]))
            .collect();
        let elements = cells
            .par_iter()
            .map(|&b| element_data(&surface, b, p + 1, q + 1))
            .collect::<Result<Vec<_>>>()?;

        let dofs = DofMap::new(surface.n_control_points());
        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); dofs.n_dofs()];
        for e in &elements {
            for &i in &e.dofs {
                rows[i].extend_from_slice(&e.dofs);
            }
        }
        let pattern = SparseMatrix::with_pattern(dofs.n_dofs(), rows);
        let mut elements = elements;
        for e in &mut elements {
            e.positions = pattern.block_positions(&e.dofs);
        }
        Ok(Self {
            surface,
            dofs,
            elements,
            pattern,
        })
    }

    pub fn n_dofs(&self) -> usize {
        self.dofs.n_dofs()
    }

    /// Zero matrix with the global sparsity pattern.
    pub fn empty_matrix(&self) -> SparseMatrix {
        self.pattern.clone()
    }

    /// Area of the patch by quadrature.
    pub fn area(&self) -> f64 {
        self.elements
            .iter()
            .flat_map(|e| e.points.iter())
            .map(|g| g.weight)
            .sum()
    }

    /// Minimum Jacobian determinant over all Gauss points.
    pub fn min_jacobian(&self) -> Result<f64> {
        let mut min = f64::INFINITY;
        for e in &self.elements {
            for g in &e.points {
                let pb = self.surface.physical_basis(g.xi, g.eta)?;
                min = min.min(pb.det_j);
            }
        }
        Ok(min)
    }
}

fn element_data(surface: &NurbsSurface, b: [f64; 4], nu: usize, nv: usize) -> Result<ElementData> {
    let (gu, wu) = gauss_on(nu, b[0], b[1]);
    let (gv, wv) = gauss_on(nv, b[2], b[3]);
    let mut points = Vec::with_capacity(nu * nv);
    let mut control_points: Option<Vec<usize>> = None;
    for (j, &v) in gv.iter().enumerate() {
        for (i, &u) in gu.iter().enumerate() {
            let pb = surface.physical_basis(u, v)?;
            match &control_points {
                None => control_points = Some(pb.indices.clone()),
                Some(c) => debug_assert_eq!(c, &pb.indices),
            }
            points.push(GaussPoint {
                xi: u,
                eta: v,
                weight: wu[i] * wv[j] * pb.det_j,
                r: pb.r,
                rx: pb.rx,
                ry: pb.ry,
                rxx: pb.rxx,
                ryy: pb.ryy,
                rxy: pb.rxy,
            });
        }
    }
    let control_points = control_points.unwrap_or_default();
    let dofs = control_points
        .iter()
        .flat_map(|&a| (0..DOFS_PER_POINT).map(move |k| DOFS_PER_POINT * a + k))
        .collect();
    Ok(ElementData {
        control_points,
        dofs,
        bounds: b,
        points,
        positions: Vec::new(),
    })
}
