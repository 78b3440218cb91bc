use nalgebra::{Matrix2, Matrix3, Vector3};

use super::{eval_bspline_basis, KnotVector};
use crate::error::{arg, Error, Result};

/// Rational tensor-product surface in the plane.
///
/// Control points are stored with the first parametric direction running
/// fastest: control point `(i, j)` lives at `i + j * n_u`.
#[derive(Debug, Clone, PartialEq)]
pub struct NurbsSurface {
    knots_u: KnotVector,
    knots_v: KnotVector,
    points: Vec<[f64; 2]>,
    weights: Vec<f64>,
}

/// Rational basis functions and their physical derivatives at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalBasis {
    /// Global control-point indices of the non-zero functions.
    pub indices: Vec<usize>,
    pub r: Vec<f64>,
    pub rx: Vec<f64>,
    pub ry: Vec<f64>,
    pub rxx: Vec<f64>,
    pub ryy: Vec<f64>,
    pub rxy: Vec<f64>,
    /// Determinant of the parametric-to-physical Jacobian.
    pub det_j: f64,
    pub point: [f64; 2],
}

/// Weighted tensor-product derivatives in parametric space.
struct RationalParametric {
    indices: Vec<usize>,
    r: Vec<f64>,
    ru: Vec<f64>,
    rv: Vec<f64>,
    ruu: Vec<f64>,
    rvv: Vec<f64>,
    ruv: Vec<f64>,
}

impl NurbsSurface {
    pub fn new(
        knots_u: KnotVector,
        knots_v: KnotVector,
        points: Vec<[f64; 2]>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        let n = knots_u.n_basis() * knots_v.n_basis();
        if points.len() != n || weights.len() != n {
            return Err(arg(format!(
                "control net has {} points and {} weights, knot vectors need {n}",
                points.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(arg("NURBS weights must be positive"));
        }
        Ok(Self {
            knots_u,
            knots_v,
            points,
            weights,
        })
    }

    pub fn knots_u(&self) -> &KnotVector {
        &self.knots_u
    }

    pub fn knots_v(&self) -> &KnotVector {
        &self.knots_v
    }

    pub fn control_points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn degrees(&self) -> (usize, usize) {
        (self.knots_u.degree(), self.knots_v.degree())
    }

    /// Control-net dimensions `(n_u, n_v)`.
    pub fn net_size(&self) -> (usize, usize) {
        (self.knots_u.n_basis(), self.knots_v.n_basis())
    }

    pub fn n_control_points(&self) -> usize {
        self.points.len()
    }

    /// Physical point `S(xi, eta)`.
    pub fn point(&self, xi: f64, eta: f64) -> Result<[f64; 2]> {
        let bu = eval_bspline_basis(&self.knots_u, xi, 0)?;
        let bv = eval_bspline_basis(&self.knots_v, eta, 0)?;
        let n_u = self.knots_u.n_basis();
        let (mut x, mut y, mut w) = (0.0, 0.0, 0.0);
        for (b, &nv) in bv.values.iter().enumerate() {
            for (a, &nu) in bu.values.iter().enumerate() {
                let k = (bu.first() + a) + (bv.first() + b) * n_u;
                let c = nu * nv * self.weights[k];
                x += c * self.points[k][0];
                y += c * self.points[k][1];
                w += c;
            }
        }
        Ok([x / w, y / w])
    }

    fn rational(&self, xi: f64, eta: f64) -> Result<RationalParametric> {
        let bu = eval_bspline_basis(&self.knots_u, xi, 2)?;
        let bv = eval_bspline_basis(&self.knots_v, eta, 2)?;
        let n_u = self.knots_u.n_basis();
        let count = bu.values.len() * bv.values.len();
        let mut indices = Vec::with_capacity(count);
        let mut nw = [
            Vec::with_capacity(count),
            Vec::with_capacity(count),
            Vec::with_capacity(count),
            Vec::with_capacity(count),
            Vec::with_capacity(count),
            Vec::with_capacity(count),
        ];
        let mut w = [0.0; 6];
        for b in 0..bv.values.len() {
            for a in 0..bu.values.len() {
                let k = (bu.first() + a) + (bv.first() + b) * n_u;
                let wk = self.weights[k];
                let t = [
                    bu.values[a] * bv.values[b] * wk,
                    bu.d1[a] * bv.values[b] * wk,
                    bu.values[a] * bv.d1[b] * wk,
                    bu.d2[a] * bv.values[b] * wk,
                    bu.values[a] * bv.d2[b] * wk,
                    bu.d1[a] * bv.d1[b] * wk,
                ];
                for (s, v) in t.iter().enumerate() {
                    nw[s].push(*v);
                    w[s] += v;
                }
                indices.push(k);
            }
        }
        let [w0, wu, wv, wuu, wvv, wuv] = w;
        let mut r = Vec::with_capacity(count);
        let mut ru = Vec::with_capacity(count);
        let mut rv = Vec::with_capacity(count);
        let mut ruu = Vec::with_capacity(count);
        let mut rvv = Vec::with_capacity(count);
        let mut ruv = Vec::with_capacity(count);
        for k in 0..count {
            let r0 = nw[0][k] / w0;
            let r_u = (nw[1][k] - r0 * wu) / w0;
            let r_v = (nw[2][k] - r0 * wv) / w0;
            r.push(r0);
            ru.push(r_u);
            rv.push(r_v);
            ruu.push((nw[3][k] - 2.0 * r_u * wu - r0 * wuu) / w0);
            rvv.push((nw[4][k] - 2.0 * r_v * wv - r0 * wvv) / w0);
            ruv.push((nw[5][k] - r_u * wv - r_v * wu - r0 * wuv) / w0);
        }
        Ok(RationalParametric {
            indices,
            r,
            ru,
            rv,
            ruu,
            rvv,
            ruv,
        })
    }

    /// Rational basis with derivatives in physical coordinates.
    ///
    /// Second derivatives use the full chain rule including the Hessian of
    /// the geometry map, so they are exact on curved patches too.
    pub fn physical_basis(&self, xi: f64, eta: f64) -> Result<PhysicalBasis> {
        let rp = self.rational(xi, eta)?;
        let mut g = [[0.0; 2]; 6]; // x, x_u, x_v, x_uu, x_vv, x_uv
        for (k, &cp) in rp.indices.iter().enumerate() {
            let p = self.points[cp];
            let c = [rp.r[k], rp.ru[k], rp.rv[k], rp.ruu[k], rp.rvv[k], rp.ruv[k]];
            for s in 0..6 {
                g[s][0] += c[s] * p[0];
                g[s][1] += c[s] * p[1];
            }
        }
        let [pt, xu, xv, xuu, xvv, xuv] = g;
        // rows: parametric direction, columns: physical direction
        let jac = Matrix2::new(xu[0], xu[1], xv[0], xv[1]);
        let det = jac.determinant();
        let scale = (xu[0] * xv[1]).abs() + (xu[1] * xv[0]).abs();
        if !(det > 1e-12 * scale) || scale == 0.0 {
            return Err(Error::Geometry { xi, eta, det });
        }
        let inv = jac.try_inverse().ok_or(Error::Geometry { xi, eta, det })?;
        let hess = Matrix3::new(
            xu[0] * xu[0],
            2.0 * xu[0] * xu[1],
            xu[1] * xu[1],
            xu[0] * xv[0],
            xu[0] * xv[1] + xu[1] * xv[0],
            xu[1] * xv[1],
            xv[0] * xv[0],
            2.0 * xv[0] * xv[1],
            xv[1] * xv[1],
        );
        let hess_lu = hess.lu();

        let n = rp.indices.len();
        let mut out = PhysicalBasis {
            indices: rp.indices.clone(),
            r: rp.r.clone(),
            rx: vec![0.0; n],
            ry: vec![0.0; n],
            rxx: vec![0.0; n],
            ryy: vec![0.0; n],
            rxy: vec![0.0; n],
            det_j: det,
            point: pt,
        };
        for k in 0..n {
            let rx = inv[(0, 0)] * rp.ru[k] + inv[(0, 1)] * rp.rv[k];
            let ry = inv[(1, 0)] * rp.ru[k] + inv[(1, 1)] * rp.rv[k];
            let rhs = Vector3::new(
                rp.ruu[k] - xuu[0] * rx - xuu[1] * ry,
                rp.ruv[k] - xuv[0] * rx - xuv[1] * ry,
                rp.rvv[k] - xvv[0] * rx - xvv[1] * ry,
            );
            let sol = hess_lu
                .solve(&rhs)
                .ok_or(Error::Geometry { xi, eta, det })?;
            out.rx[k] = rx;
            out.ry[k] = ry;
            out.rxx[k] = sol[0];
            out.rxy[k] = sol[1];
            out.ryy[k] = sol[2];
        }
        Ok(out)
    }

    /// Parametric coordinates of a physical point, found by Newton
    /// iteration on the geometry map.
    pub fn locate(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        let outside = || Error::Domain {
            quantity: "query point",
            value: x,
            range: format!("physical patch (y = {y})"),
        };
        let mut best: Option<(f64, f64, f64)> = None;
        let seeds = [0.5, 0.25, 0.75, 0.1, 0.9];
        for &s in &seeds {
            for &t in &seeds {
                let (mut u, mut v) = (s, t);
                for _ in 0..60 {
                    let rp = match self.rational(u, v) {
                        Ok(rp) => rp,
                        Err(_) => break,
                    };
                    let (mut pt, mut xu, mut xv) = ([0.0; 2], [0.0; 2], [0.0; 2]);
                    for (k, &cp) in rp.indices.iter().enumerate() {
                        let p = self.points[cp];
                        for d in 0..2 {
                            pt[d] += rp.r[k] * p[d];
                            xu[d] += rp.ru[k] * p[d];
                            xv[d] += rp.rv[k] * p[d];
                        }
                    }
                    let fx = pt[0] - x;
                    let fy = pt[1] - y;
                    let det = xu[0] * xv[1] - xv[0] * xu[1];
                    if det == 0.0 {
                        break;
                    }
                    let du = (fx * xv[1] - fy * xv[0]) / det;
                    let dv = (xu[0] * fy - xu[1] * fx) / det;
                    u = (u - du).clamp(0.0, 1.0);
                    v = (v - dv).clamp(0.0, 1.0);
                    if du.abs() < 1e-15 && dv.abs() < 1e-15 {
                        break;
                    }
                }
                let p = self.point(u, v)?;
                let err = (p[0] - x).hypot(p[1] - y);
                if best.is_none_or(|b| err < b.2) {
                    best = Some((u, v, err));
                }
            }
        }
        let (u, v, err) = best.ok_or_else(outside)?;
        let size = self
            .points
            .iter()
            .fold(0.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs()))
            .max(1e-300);
        if err > 1e-9 * size {
            return Err(outside());
        }
        Ok((u, v))
    }
}
