use crate::error::{Error, Result};
use crate::quadrature::gauss_on;

const BASE_POINTS: usize = 20;
const MAX_DOUBLINGS: usize = 4;
const REL_TOL: f64 = 1e-10;
/// Panels shrink geometrically towards the bottom face, where `s^n` with
/// non-integer `n` is not smooth.
const GRADED_PANELS: i32 = 40;

/// Integrates a vector-valued function of the thickness coordinate over
/// `[-h/2, h/2]`.
///
/// Composite Gauss-Legendre on panels graded towards `z = -h/2`; the number
/// of points per panel starts at 20 and doubles until every component
/// changes by less than 1e-10 relative to the integral of its magnitude.
pub fn integrate_thickness<const N: usize, F>(h: f64, f: F) -> Result<[f64; N]>
where
    F: Fn(f64) -> Result<[f64; N]>,
{
    let mut breaks = vec![0.0];
    for k in (1..=GRADED_PANELS).rev() {
        breaks.push(0.5f64.powi(k));
    }
    breaks.push(1.0);

    let rule = |points: usize| -> Result<([f64; N], [f64; N])> {
        let mut sum = [0.0; N];
        let mut abs = [0.0; N];
        for w in breaks.windows(2) {
            let (s, ws) = gauss_on(points, w[0], w[1]);
            for (si, wi) in s.iter().zip(&ws) {
                let v = f((si - 0.5) * h)?;
                for c in 0..N {
                    sum[c] += wi * h * v[c];
                    abs[c] += wi * h * v[c].abs();
                }
            }
        }
        Ok((sum, abs))
    };

    let (mut prev, _) = rule(BASE_POINTS)?;
    let mut points = BASE_POINTS;
    let mut change = f64::INFINITY;
    for _ in 0..MAX_DOUBLINGS {
        points *= 2;
        let (next, abs) = rule(points)?;
        change = (0..N)
            .filter(|&c| abs[c] > 0.0)
            .map(|c| (next[c] - prev[c]).abs() / abs[c])
            .fold(0.0, f64::max);
        prev = next;
        if change < REL_TOL {
            return Ok(prev);
        }
    }
    Err(Error::Integration { change })
}
