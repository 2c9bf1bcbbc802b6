use crate::Real;

/// Natural cubic spline through strictly increasing knots.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct CubicSpline<T> {
    knots: Vec<T>,
    values: Vec<T>,
    second: Vec<T>,
}

impl<T: Real> CubicSpline<T> {
    /// Caller guarantees at least two strictly increasing knots.
    pub(crate) fn natural(knots: Vec<T>, values: Vec<T>) -> Self {
        let n = knots.len();
        let mut second = vec![T::zero(); n];
        if n > 2 {
            // Tridiagonal solve for the interior second derivatives.
            let mut diag = vec![T::zero(); n];
            let mut rhs = vec![T::zero(); n];
            let two = T::of(2.0);
            let six = T::of(6.0);
            for i in 1..n - 1 {
                let h0 = knots[i] - knots[i - 1];
                let h1 = knots[i + 1] - knots[i];
                diag[i] = two * (h0 + h1);
                rhs[i] = six * ((values[i + 1] - values[i]) / h1 - (values[i] - values[i - 1]) / h0);
            }
            for i in 2..n - 1 {
                let h = knots[i] - knots[i - 1];
                let w = h / diag[i - 1];
                diag[i] = diag[i] - w * h;
                rhs[i] = rhs[i] - w * rhs[i - 1];
            }
            for i in (1..n - 1).rev() {
                let upper = if i + 1 < n - 1 {
                    (knots[i + 1] - knots[i]) * second[i + 1]
                } else {
                    T::zero()
                };
                second[i] = (rhs[i] - upper) / diag[i];
            }
        }
        Self {
            knots,
            values,
            second,
        }
    }

    pub(crate) fn first(&self) -> T {
        self.knots[0]
    }

    pub(crate) fn last(&self) -> T {
        self.knots[self.knots.len() - 1]
    }

    /// Interpolated value; zero outside the knot range.
    pub(crate) fn eval(&self, x: T) -> T {
        if !(x >= self.first() && x <= self.last()) {
            return T::zero();
        }
        let i = match self
            .knots
            .binary_search_by(|k| k.partial_cmp(&x).unwrap_or(std::cmp::Ordering::Less))
        {
            Ok(i) => return self.values[i],
            Err(i) => i - 1,
        };
        let h = self.knots[i + 1] - self.knots[i];
        let a = (self.knots[i + 1] - x) / h;
        let b = (x - self.knots[i]) / h;
        let six = T::of(6.0);
        a * self.values[i]
            + b * self.values[i + 1]
            + ((a * a * a - a) * self.second[i] + (b * b * b - b) * self.second[i + 1]) * h * h
                / six
    }
}
