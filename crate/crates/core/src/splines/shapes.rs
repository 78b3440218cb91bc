//! Single-patch geometries used by the plate presets.

use std::f64::consts::FRAC_1_SQRT_2;

use super::{refine_knots, KnotVector, NurbsSurface};
use crate::error::{arg, Result};

/// Rectangle `[0, lx] x [0, ly]` with `elements` spans per direction at
/// degree `p`. Control points sit at the Greville abscissae, which makes
/// the map exactly affine.
pub fn rectangle(lx: f64, ly: f64, elements: usize, p: usize) -> Result<NurbsSurface> {
    parallelogram([lx, 0.0], [0.0, ly], elements, p)
}

/// Parallelogram spanned by two edge vectors from the origin.
pub fn parallelogram(
    e1: [f64; 2],
    e2: [f64; 2],
    elements: usize,
    p: usize,
) -> Result<NurbsSurface> {
    let cross = e1[0] * e2[1] - e1[1] * e2[0];
    if !(cross > 0.0) {
        return Err(arg(
            "parallelogram edges must be positively oriented and non-degenerate",
        ));
    }
    let kv = KnotVector::open_uniform(elements, p)?;
    let g = kv.greville();
    let mut pts = Vec::with_capacity(g.len() * g.len());
    for &b in &g {
        for &a in &g {
            pts.push([a * e1[0] + b * e2[0], a * e1[1] + b * e2[1]]);
        }
    }
    let n = pts.len();
    NurbsSurface::new(kv.clone(), kv, pts, vec![1.0; n])
}

/// Skew plate with side lengths `lx`, `ly`; the second edge is rotated by
/// `skew_deg` degrees from the y-axis towards +x.
pub fn skew(lx: f64, ly: f64, skew_deg: f64, elements: usize, p: usize) -> Result<NurbsSurface> {
    if !(skew_deg.abs() < 90.0) {
        return Err(arg("skew angle must lie in (-90, 90) degrees"));
    }
    let t = skew_deg.to_radians();
    parallelogram([lx, 0.0], [ly * t.sin(), ly * t.cos()], elements, p)
}

/// Disk of the given radius centred at the origin as one rational
/// quadratic patch. Each patch edge is a quarter arc; the four corners of
/// the parametric square land on the circle at 45 degree diagonals.
pub fn disk(radius: f64, elements: usize) -> Result<NurbsSurface> {
    if !(radius > 0.0) {
        return Err(arg("radius must be positive"));
    }
    let kv = KnotVector::open_uniform(1, 2)?;
    let c = FRAC_1_SQRT_2 * radius;
    let s = std::f64::consts::SQRT_2 * radius;
    let w = FRAC_1_SQRT_2;
    let pts = vec![
        [-c, -c],
        [0.0, -s],
        [c, -c],
        [-s, 0.0],
        [0.0, 0.0],
        [s, 0.0],
        [-c, c],
        [0.0, s],
        [c, c],
    ];
    let weights = vec![1.0, w, 1.0, w, 1.0, w, 1.0, w, 1.0];
    let patch = NurbsSurface::new(kv.clone(), kv, pts, weights)?;
    refine_knots(&patch, (elements, elements))
}
