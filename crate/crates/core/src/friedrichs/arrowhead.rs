//! Eigen-decomposition of a symmetric arrowhead matrix
//!
//! ```text
//! [ head  b^T ]
//! [ b     D   ]      D = diag(d_1 < d_2 < ... < d_n)
//! ```
//!
//! through its secular equation `F(x) = x - head - Σ b_i^2 / (x - d_i) = 0`.
//! `F` increases monotonically between consecutive poles, so there is exactly
//! one root in each gap plus one below `d_1` and one above `d_n`. Each root is
//! solved for as an offset from its nearest pole to keep full relative accuracy,
//! and the weight of the head vector in the eigenvector is `1 / F'(x)`.

use crate::Real;

pub(crate) struct ArrowheadEigen<T> {
    pub(crate) eigenvalues: Vec<T>,
    pub(crate) head_weights: Vec<T>,
}

pub(crate) fn arrowhead_eigen<T: Real>(
    head: T,
    diag: &[T],
    border: &[T],
) -> Result<ArrowheadEigen<T>, String> {
    if diag.len() != border.len() {
        return Err("diagonal and border lengths differ".into());
    }
    if diag.windows(2).any(|w| !(w[1] > w[0])) {
        return Err("diagonal must be strictly increasing".into());
    }
    let norm = border.iter().fold(T::zero(), |a, &b| a + b * b).sqrt();
    let scale = diag
        .iter()
        .fold(head.abs().max(norm), |a, &d| a.max(d.abs()));
    let deflate = T::epsilon() * scale;

    let mut pairs: Vec<(T, T)> = Vec::with_capacity(diag.len() + 1);
    let mut poles = Vec::new();
    let mut weights2 = Vec::new();
    for (&d, &b) in diag.iter().zip(border) {
        if b.abs() <= deflate {
            pairs.push((d, T::zero()));
        } else {
            poles.push(d);
            weights2.push(b * b);
        }
    }

    let m = poles.len();
    if m == 0 {
        pairs.push((head, T::one()));
    } else {
        let margin = norm + T::one();
        let low = head.min(poles[0]) - margin;
        let high = head.max(poles[m - 1]) + margin;
        for gap in 0..=m {
            let (origin, lo, hi) = if gap == 0 {
                (poles[0], low - poles[0], T::zero())
            } else if gap == m {
                (poles[m - 1], T::zero(), high - poles[m - 1])
            } else {
                let (left, right) = (poles[gap - 1], poles[gap]);
                let mid = T::of(0.5) * (left + right);
                if secular(head, &poles, &weights2, mid, T::zero()).0 > T::zero() {
                    (left, T::zero(), mid - left)
                } else {
                    (right, mid - right, T::zero())
                }
            };
            let (delta, slope) = solve_gap(head, &poles, &weights2, origin, lo, hi)?;
            pairs.push((origin + delta, T::one() / slope));
        }
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let (eigenvalues, head_weights) = pairs.into_iter().unzip();
    Ok(ArrowheadEigen {
        eigenvalues,
        head_weights,
    })
}

/// `(F, F')` at `origin + delta`, with pole distances formed before adding `delta`.
fn secular<T: Real>(head: T, poles: &[T], weights2: &[T], origin: T, delta: T) -> (T, T) {
    let mut value = origin - head + delta;
    let mut slope = T::one();
    for (&p, &w2) in poles.iter().zip(weights2) {
        let gap = (origin - p) + delta;
        let q = w2 / gap;
        value = value - q;
        slope = slope + q / gap;
    }
    (value, slope)
}

/// Safeguarded Newton on the open bracket `(lo, hi)` around the root offset.
fn solve_gap<T: Real>(
    head: T,
    poles: &[T],
    weights2: &[T],
    origin: T,
    mut lo: T,
    mut hi: T,
) -> Result<(T, T), String> {
    let two = T::of(2.0);
    let mut x = T::of(0.5) * (lo + hi);
    for _ in 0..300 {
        let (f, df) = secular(head, poles, weights2, origin, x);
        if !f.is_finite() || !df.is_finite() {
            return Err(format!("secular function not finite near {}", origin + x));
        }
        if f == T::zero() {
            return Ok((x, df));
        }
        if f < T::zero() {
            lo = x;
        } else {
            hi = x;
        }
        let mut next = x - f / df;
        if !(next > lo && next < hi) {
            next = T::of(0.5) * (lo + hi);
        }
        let tol = two * T::epsilon() * next.abs().max(T::min_positive_value());
        if (next - x).abs() <= tol || (hi - lo) <= tol {
            let (_, df) = secular(head, poles, weights2, origin, next);
            return Ok((next, df));
        }
        x = next;
    }
    Err(format!("secular root near {} did not converge", origin + x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two() {
        // [[0, 1], [1, 0]] -> eigenvalues ±1 with equal weights.
        let e = arrowhead_eigen(0.0f64, &[0.0], &[1.0]).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-15);
        assert!((e.head_weights[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn deflated_levels_keep_zero_weight() {
        let e = arrowhead_eigen(0.5f64, &[0.0, 1.0, 2.0], &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(e.eigenvalues, vec![0.0, 0.5, 1.0, 2.0]);
        assert_eq!(e.head_weights, vec![0.0, 1.0, 0.0, 0.0]);
    }
}
