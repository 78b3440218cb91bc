use super::{KnotVector, NurbsSurface};
use crate::error::{arg, Result};

/// Splits every non-empty knot span into `subdivisions` equal parts in each
/// parametric direction by knot insertion. The physical map is unchanged.
pub fn refine_knots(surface: &NurbsSurface, subdivisions: (usize, usize)) -> Result<NurbsSurface> {
    if subdivisions.0 == 0 || subdivisions.1 == 0 {
        return Err(arg("subdivisions must be at least 1"));
    }
    let (n_u, n_v) = surface.net_size();
    // homogeneous coordinates (w x, w y, w)
    let mut net: Vec<[f64; 3]> = surface
        .control_points()
        .iter()
        .zip(surface.weights())
        .map(|(p, &w)| [p[0] * w, p[1] * w, w])
        .collect();

    let new_u = midpoints(surface.knots_u(), subdivisions.0);
    let new_v = midpoints(surface.knots_v(), subdivisions.1);

    let mut ku = surface.knots_u().clone();
    let mut cols = n_u;
    for &t in &new_u {
        let rows: Vec<Vec<[f64; 3]>> = (0..n_v)
            .map(|j| insert_knot(&ku, &net[j * cols..(j + 1) * cols], t))
            .collect();
        ku = insert_into(&ku, t)?;
        cols += 1;
        net = rows.into_iter().flatten().collect();
    }

    let mut kv = surface.knots_v().clone();
    for (rows, &t) in (n_v..).zip(&new_v) {
        let mut out = vec![[0.0; 3]; cols * (rows + 1)];
        for i in 0..cols {
            let column: Vec<[f64; 3]> = (0..rows).map(|j| net[i + j * cols]).collect();
            let refined = insert_knot(&kv, &column, t);
            for (j, c) in refined.into_iter().enumerate() {
                out[i + j * cols] = c;
            }
        }
        kv = insert_into(&kv, t)?;
        net = out;
    }

    let points = net.iter().map(|h| [h[0] / h[2], h[1] / h[2]]).collect();
    let weights = net.iter().map(|h| h[2]).collect();
    NurbsSurface::new(ku, kv, points, weights)
}

fn midpoints(kv: &KnotVector, parts: usize) -> Vec<f64> {
    let mut out = Vec::new();
    for (_, a, b) in kv.spans() {
        for k in 1..parts {
            out.push(a + (b - a) * k as f64 / parts as f64);
        }
    }
    out
}

fn insert_into(kv: &KnotVector, t: f64) -> Result<KnotVector> {
    let mut knots = kv.knots().to_vec();
    let pos = knots.partition_point(|&k| k <= t);
    knots.insert(pos, t);
    KnotVector::new(knots, kv.degree())
}

/// Boehm insertion of a single knot into a curve with homogeneous points.
fn insert_knot(kv: &KnotVector, pts: &[[f64; 3]], t: f64) -> Vec<[f64; 3]> {
    let p = kv.degree();
    let u = kv.knots();
    let k = kv.find_span(t);
    let mut out = Vec::with_capacity(pts.len() + 1);
    for i in 0..=pts.len() {
        if i + p <= k {
            out.push(pts[i]);
        } else if i > k {
            out.push(pts[i - 1]);
        } else {
            let alpha = (t - u[i]) / (u[i + p] - u[i]);
            let a = pts[i];
            let b = pts[i - 1];
            out.push([
                alpha * a[0] + (1.0 - alpha) * b[0],
                alpha * a[1] + (1.0 - alpha) * b[1],
                alpha * a[2] + (1.0 - alpha) * b[2],
            ]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::shapes;
    use super::*;

    #[test]
    fn one_subdivision_is_identity() {
        let s = shapes::disk(1.0, 1).unwrap();
        assert_eq!(refine_knots(&s, (1, 1)).unwrap(), s);
        assert!(refine_knots(&s, (0, 2)).is_err());
    }

    #[test]
    fn refinement_counts() {
        let s = shapes::rectangle(1.0, 1.0, 1, 3).unwrap();
        let r = refine_knots(&s, (4, 4)).unwrap();
        assert_eq!(r.net_size(), (7, 7));
        assert_eq!(r.knots_u().spans().len(), 4);
    }
}
