use crate::error::{arg, Error, Result};

/// Open, normalized knot vector of a univariate B-spline basis.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotVector {
    knots: Vec<f64>,
    degree: usize,
}

impl KnotVector {
    /// Validates an explicit knot sequence.
    ///
    /// The sequence must be non-decreasing, start at 0, end at 1, and be
    /// open: the end knots repeat exactly `degree + 1` times.
    pub fn new(knots: Vec<f64>, degree: usize) -> Result<Self> {
        if knots.len() < 2 * (degree + 1) {
            return Err(arg(format!(
                "knot vector of length {} too short for degree {degree}",
                knots.len()
            )));
        }
        if knots.iter().any(|k| !k.is_finite()) {
            return Err(arg("knot vector contains non-finite values"));
        }
        if knots.windows(2).any(|w| w[1] < w[0]) {
            return Err(arg("knots must be non-decreasing"));
        }
        let first = knots[0];
        let last = *knots.last().unwrap();
        if first != 0.0 || last != 1.0 {
            return Err(arg("knot vector must span [0, 1]"));
        }
        let head = knots.iter().take_while(|&&k| k == first).count();
        let tail = knots.iter().rev().take_while(|&&k| k == last).count();
        if head != degree + 1 || tail != degree + 1 {
            return Err(arg(format!(
                "open knot vector needs end multiplicity {}, found {head} and {tail}",
                degree + 1
            )));
        }
        // interior multiplicity above p would disconnect the basis
        let mut i = degree + 1;
        while i < knots.len() - degree - 1 {
            let m = knots[i..].iter().take_while(|&&k| k == knots[i]).count();
            if m > degree {
                return Err(arg(format!(
                    "interior knot {} has multiplicity {m} > degree {degree}",
                    knots[i]
                )));
            }
            i += m;
        }
        Ok(Self { knots, degree })
    }

    /// Uniform open knot vector with `n_elements` non-empty spans.
    pub fn open_uniform(n_elements: usize, degree: usize) -> Result<Self> {
        if n_elements == 0 {
            return Err(arg("number of elements must be positive"));
        }
        if degree == 0 {
            return Err(arg("degree must be at least 1"));
        }
        let mut knots = vec![0.0; degree + 1];
        for e in 1..n_elements {
            knots.push(e as f64 / n_elements as f64);
        }
        knots.extend(std::iter::repeat_n(1.0, degree + 1));
        Self::new(knots, degree)
    }

    /// Returns a copy with `value` inserted until its multiplicity equals
    /// `multiplicity`.
    pub fn with_multiplicity(&self, value: f64, multiplicity: usize) -> Result<Self> {
        if !(value > 0.0 && value < 1.0) {
            return Err(Error::Domain {
                quantity: "interior knot",
                value,
                range: "(0, 1)".into(),
            });
        }
        let existing = self.knots.iter().filter(|&&k| k == value).count();
        let mut knots = self.knots.clone();
        for _ in existing..multiplicity {
            let pos = knots.partition_point(|&k| k <= value);
            knots.insert(pos, value);
        }
        Self::new(knots, self.degree)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n_basis(&self) -> usize {
        self.knots.len() - self.degree - 1
    }

    /// Index `k` with `knots[k] <= u < knots[k+1]`; the last non-empty span
    /// is closed at `u = 1`.
    pub fn find_span(&self, u: f64) -> usize {
        let p = self.degree;
        let n = self.n_basis();
        if u >= self.knots[n] {
            return n - 1;
        }
        if u <= self.knots[p] {
            return p;
        }
        // first index with knots[i] > u, minus one
        self.knots.partition_point(|&k| k <= u) - 1
    }

    /// Non-empty spans as (span index, lower knot, upper knot).
    pub fn spans(&self) -> Vec<(usize, f64, f64)> {
        let p = self.degree;
        (p..self.n_basis())
            .filter(|&i| self.knots[i + 1] > self.knots[i])
            .map(|i| (i, self.knots[i], self.knots[i + 1]))
            .collect()
    }

    /// Greville abscissae, one per basis function.
    pub fn greville(&self) -> Vec<f64> {
        let p = self.degree;
        (0..self.n_basis())
            .map(|i| self.knots[i + 1..=i + p].iter().sum::<f64>() / p as f64)
            .collect()
    }

    /// Coefficients `c_i` with `sum c_i N_i(u) = u^2` (degree >= 2), from
    /// the polar form of the monomial.
    pub fn square_coefficients(&self) -> Vec<f64> {
        let p = self.degree;
        let pairs = (p * (p - 1) / 2) as f64;
        (0..self.n_basis())
            .map(|i| {
                let t = &self.knots[i + 1..=i + p];
                let mut s = 0.0;
                for a in 0..p {
                    for b in a + 1..p {
                        s += t[a] * t[b];
                    }
                }
                s / pairs
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_bezier_span() {
        let kv = KnotVector::open_uniform(1, 2).unwrap();
        assert_eq!(kv.knots(), &[0.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        assert_eq!(kv.n_basis(), 3);
    }

    #[test]
    fn two_linear_spans() {
        let kv = KnotVector::open_uniform(2, 1).unwrap();
        assert_eq!(kv.knots(), &[0.0, 0.0, 0.5, 1.0, 1.0]);
    }

    #[test]
    fn repeated_interior_knot() {
        let kv = KnotVector::open_uniform(5, 2)
            .unwrap()
            .with_multiplicity(0.6, 2)
            .unwrap();
        let expected = [0.0, 0.0, 0.0, 0.2, 0.4, 0.6, 0.6, 0.8, 1.0, 1.0, 1.0];
        assert_eq!(kv.knots().len(), expected.len());
        for (a, b) in kv.knots().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(kv.spans().len(), 5);
    }

    #[test]
    fn invalid_counts_rejected() {
        assert!(KnotVector::open_uniform(0, 2).is_err());
        assert!(KnotVector::open_uniform(3, 0).is_err());
        assert!(KnotVector::new(vec![0.0, 0.0, 1.0, 1.0, 1.0], 2).is_err());
        assert!(KnotVector::new(vec![0.0, 0.0, 0.5, 0.4, 1.0, 1.0], 1).is_err());
    }

    #[test]
    fn span_lookup_is_right_continuous_and_closed_at_one() {
        let kv = KnotVector::open_uniform(4, 2).unwrap();
        assert_eq!(kv.find_span(0.0), 2);
        assert_eq!(kv.find_span(0.25), 3);
        assert_eq!(kv.find_span(0.2499), 2);
        assert_eq!(kv.find_span(1.0), 5);
    }
}
