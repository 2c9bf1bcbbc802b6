//! Small least-squares fits used for regime and line-shape analysis.

use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit<T> {
    pub slope: T,
    pub intercept: T,
    pub max_abs_residual: T,
    pub rms_residual: T,
}

/// Ordinary least-squares line `y = slope * x + intercept`. Needs two distinct `x`.
pub fn fit_line<T: Real>(xs: &[T], ys: &[T]) -> Option<LineFit<T>> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let nf = T::of(n as f64);
    let mx = xs.iter().fold(T::zero(), |a, &x| a + x) / nf;
    let my = ys.iter().fold(T::zero(), |a, &y| a + y) / nf;
    let (mut sxx, mut sxy) = (T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        sxx = sxx + (x - mx) * (x - mx);
        sxy = sxy + (x - mx) * (y - my);
    }
    if !(sxx > T::zero()) {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let (max_abs_residual, ss) = residuals(xs, ys, |x| slope * x + intercept);
    Some(LineFit {
        slope,
        intercept,
        max_abs_residual,
        rms_residual: (ss / nf).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticFit<T> {
    /// Coefficients of `c0 + c1 x + c2 x^2`.
    pub coefficients: [T; 3],
    pub max_abs_residual: T,
}

/// Least-squares parabola through the samples (normal equations on centred `x`).
pub fn fit_quadratic<T: Real>(xs: &[T], ys: &[T]) -> Option<QuadraticFit<T>> {
    let n = xs.len();
    if n < 3 || ys.len() != n {
        return None;
    }
    let nf = T::of(n as f64);
    let shift = xs.iter().fold(T::zero(), |a, &x| a + x) / nf;
    let mut m = [[T::zero(); 3]; 3];
    let mut rhs = [T::zero(); 3];
    for (&x, &y) in xs.iter().zip(ys) {
        let u = x - shift;
        let p = [T::one(), u, u * u];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = m[i][j] + p[i] * p[j];
            }
            rhs[i] = rhs[i] + p[i] * y;
        }
    }
    let c = solve3(m, rhs)?;
    // Expand c0 + c1 u + c2 u^2 with u = x - shift.
    let coefficients = [
        c[0] - c[1] * shift + c[2] * shift * shift,
        c[1] - T::of(2.0) * c[2] * shift,
        c[2],
    ];
    let (max_abs_residual, _) =
        residuals(xs, ys, |x| c[0] + c[1] * (x - shift) + c[2] * (x - shift) * (x - shift));
    Some(QuadraticFit {
        coefficients,
        max_abs_residual,
    })
}

fn residuals<T: Real>(xs: &[T], ys: &[T], model: impl Fn(T) -> T) -> (T, T) {
    xs.iter()
        .zip(ys)
        .fold((T::zero(), T::zero()), |(mx, ss), (&x, &y)| {
            let r = y - model(x);
            (mx.max(r.abs()), ss + r * r)
        })
}

fn solve3<T: Real>(mut m: [[T; 3]; 3], mut b: [T; 3]) -> Option<[T; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| {
            m[i][col]
                .abs()
                .partial_cmp(&m[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if !(m[pivot][col].abs() > T::zero()) {
            return None;
        }
        m.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let factor = m[row][col] / m[col][col];
            let pivot_row = m[col];
            for (x, &p) in m[row].iter_mut().zip(&pivot_row).skip(col) {
                *x = *x - factor * p;
            }
            b[row] = b[row] - factor * b[col];
        }
    }
    let mut x = [T::zero(); 3];
    for row in (0..3).rev() {
        let mut acc = b[row];
        for k in row + 1..3 {
            acc = acc - m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| -0.5 * x + 2.0).collect();
        let f = fit_line(&xs, &ys).unwrap();
        assert_abs_diff_eq!(f.slope, -0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(f.intercept, 2.0, epsilon = 1e-14);
        assert!(f.max_abs_residual < 1e-14);
    }

    #[test]
    fn exact_parabola() {
        let xs: Vec<f64> = (0..9).map(|i| 10.0 + i as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 2.0 * x + 0.5 * x * x).collect();
        let f = fit_quadratic(&xs, &ys).unwrap();
        assert_abs_diff_eq!(f.coefficients[0], 3.0, epsilon = 1e-8);
        assert_abs_diff_eq!(f.coefficients[1], -2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(f.coefficients[2], 0.5, epsilon = 1e-10);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(fit_line(&[1.0, 1.0], &[0.0, 1.0]).is_none());
        assert!(fit_quadratic(&[1.0, 2.0], &[0.0, 1.0]).is_none());
    }
}
