use super::KnotVector;
use crate::error::{Error, Result};

/// Non-zero B-spline basis functions at one parameter value.
///
/// `values[k]` belongs to basis function `first() + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisEvaluation {
    pub span: usize,
    pub degree: usize,
    pub values: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
}

impl BasisEvaluation {
    /// Global index of the first non-zero function.
    pub fn first(&self) -> usize {
        self.span - self.degree
    }
}

/// Evaluates the `p + 1` non-zero basis functions of `kv` at `xi`, together
/// with derivatives up to `derivative_order` (0, 1 or 2). Derivatives that
/// were not requested are returned as zeros.
///
/// Uses the triangular Cox-de Boor table; knot differences spanning the
/// containing span are never zero, so the 0/0 := 0 convention only matters
/// for the derivative coefficients, where it is applied explicitly.
pub fn eval_bspline_basis(
    kv: &KnotVector,
    xi: f64,
    derivative_order: usize,
) -> Result<BasisEvaluation> {
    if !(0.0..=1.0).contains(&xi) {
        return Err(Error::Domain {
            quantity: "xi",
            value: xi,
            range: "[0, 1]".into(),
        });
    }
    if derivative_order > 2 {
        return Err(crate::error::arg("derivative order must be 0, 1 or 2"));
    }
    let p = kv.degree();
    let u = kv.knots();
    let span = kv.find_span(xi);

    // ndu[j][r]: basis values (upper triangle incl. diagonal) and knot
    // differences (lower triangle)
    let mut ndu = vec![vec![0.0; p + 1]; p + 1];
    let mut left = vec![0.0; p + 1];
    let mut right = vec![0.0; p + 1];
    ndu[0][0] = 1.0;
    for j in 1..=p {
        left[j] = xi - u[span + 1 - j];
        right[j] = u[span + j] - xi;
        let mut saved = 0.0;
        for r in 0..j {
            ndu[j][r] = right[r + 1] + left[j - r];
            let temp = safe_div(ndu[r][j - 1], ndu[j][r]);
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }

    let values: Vec<f64> = (0..=p).map(|j| ndu[j][p]).collect();
    let n = derivative_order.min(p);
    let mut ders = vec![vec![0.0; p + 1]; 3];
    ders[0].clone_from(&values);

    let mut a = vec![vec![0.0; p + 1]; 2];
    for r in 0..=p {
        let (mut s1, mut s2) = (0usize, 1usize);
        a[0].iter_mut().for_each(|v| *v = 0.0);
        a[0][0] = 1.0;
        for k in 1..=n {
            let mut d = 0.0;
            let rk = r as isize - k as isize;
            let pk = p - k;
            if r >= k {
                let rk = rk as usize;
                a[s2][0] = safe_div(a[s1][0], ndu[pk + 1][rk]);
                d = a[s2][0] * ndu[rk][pk];
            }
            let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
            let j2 = if (r as isize) - 1 <= pk as isize {
                k - 1
            } else {
                p - r
            };
            for j in j1..=j2 {
                let idx = (rk + j as isize) as usize;
                a[s2][j] = safe_div(a[s1][j] - a[s1][j - 1], ndu[pk + 1][idx]);
                d += a[s2][j] * ndu[idx][pk];
            }
            if r as isize <= pk as isize {
                a[s2][k] = safe_div(-a[s1][k - 1], ndu[pk + 1][r]);
                d += a[s2][k] * ndu[r][pk];
            }
            ders[k][r] = d;
            std::mem::swap(&mut s1, &mut s2);
        }
    }
    let mut factor = p as f64;
    for k in 1..=n {
        for v in ders[k].iter_mut() {
            *v *= factor;
        }
        factor *= (p - k) as f64;
    }

    Ok(BasisEvaluation {
        span,
        degree: p,
        values,
        d1: ders[1].clone(),
        d2: ders[2].clone(),
    })
}

#[inline]
fn safe_div(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Textbook recursion, used as an independent oracle.
    fn cox_de_boor(u: &[f64], i: usize, p: usize, x: f64, last_span: usize) -> f64 {
        if p == 0 {
            let inside = (u[i] <= x && x < u[i + 1]) || (i == last_span && x == u[i + 1]);
            return if inside { 1.0 } else { 0.0 };
        }
        let a = safe_div(x - u[i], u[i + p] - u[i]);
        let b = safe_div(u[i + p + 1] - x, u[i + p + 1] - u[i + 1]);
        a * cox_de_boor(u, i, p - 1, x, last_span) + b * cox_de_boor(u, i + 1, p - 1, x, last_span)
    }

    #[test]
    fn bernstein_quadratic() {
        let kv = KnotVector::open_uniform(1, 2).unwrap();
        let b = eval_bspline_basis(&kv, 0.5, 2).unwrap();
        assert_eq!(b.values, vec![0.25, 0.5, 0.25]);
        for (x, e) in b.d1.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((x - e).abs() < 1e-14);
        }
        for xi in [0.0, 0.13, 0.77, 1.0] {
            let b = eval_bspline_basis(&kv, xi, 2).unwrap();
            for (x, e) in b.d2.iter().zip([2.0, -4.0, 2.0]) {
                assert!((x - e).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn out_of_domain() {
        let kv = KnotVector::open_uniform(3, 2).unwrap();
        assert!(matches!(
            eval_bspline_basis(&kv, 1.01, 0),
            Err(Error::Domain { .. })
        ));
        assert!(eval_bspline_basis(&kv, -0.1, 0).is_err());
    }

    #[test]
    fn matches_recursive_definition() {
        let kv = KnotVector::open_uniform(5, 3)
            .unwrap()
            .with_multiplicity(0.6, 2)
            .unwrap();
        let last = kv.spans().last().unwrap().0;
        for s in 0..=200 {
            let xi = s as f64 / 200.0;
            let b = eval_bspline_basis(&kv, xi, 0).unwrap();
            for i in 0..kv.n_basis() {
                let expect = cox_de_boor(kv.knots(), i, 3, xi, last);
                let got = if i >= b.first() && i <= b.span {
                    b.values[i - b.first()]
                } else {
                    0.0
                };
                assert!((expect - got).abs() < 1e-13, "xi={xi} i={i}");
            }
        }
    }

    #[test]
    fn derivatives_match_central_differences() {
        let kv = KnotVector::open_uniform(4, 3).unwrap();
        let h = 1e-5;
        for &xi in &[0.1, 0.33, 0.6, 0.9] {
            let b = eval_bspline_basis(&kv, xi, 2).unwrap();
            let bp = eval_bspline_basis(&kv, xi + h, 2).unwrap();
            let bm = eval_bspline_basis(&kv, xi - h, 2).unwrap();
            assert_eq!(bp.span, b.span);
            assert_eq!(bm.span, b.span);
            for k in 0..4 {
                let fd1 = (bp.values[k] - bm.values[k]) / (2.0 * h);
                let fd2 = (bp.d1[k] - bm.d1[k]) / (2.0 * h);
                assert!((fd1 - b.d1[k]).abs() <= 1e-6 * b.d1[k].abs().max(1.0));
                assert!((fd2 - b.d2[k]).abs() <= 1e-6 * b.d2[k].abs().max(1.0));
            }
        }
    }
}
