use num_complex::Complex;

use super::NumericsError;
use crate::Real;

fn rk4_span<T: Real, F>(rhs: &F, t0: T, t1: T, y0: Complex<T>, steps: usize) -> Complex<T>
where
    F: Fn(T, Complex<T>) -> Complex<T>,
{
    let h = (t1 - t0) / T::of(steps as f64);
    let half = T::of(0.5);
    let sixth = T::one() / T::of(6.0);
    let two = T::of(2.0);
    let mut y = y0;
    for i in 0..steps {
        let t = t0 + h * T::of(i as f64);
        let k1 = rhs(t, y);
        let k2 = rhs(t + h * half, y + k1 * (h * half));
        let k3 = rhs(t + h * half, y + k2 * (h * half));
        let k4 = rhs(t + h, y + k3 * h);
        y = y + (k1 + k2 * two + k3 * two + k4) * (h * sixth);
    }
    y
}

/// Integrates `y' = rhs(tau, y)` from `y(grid[0]) = y0` and returns `y` at every
/// grid point.
///
/// Each grid interval is stepped with classical RK4; the number of substeps is
/// doubled until two successive refinements agree to `1e-12` relative.
pub fn ode_evolve<T: Real, F>(
    rhs: F,
    y0: Complex<T>,
    grid: &[T],
) -> Result<Vec<Complex<T>>, NumericsError>
where
    F: Fn(T, Complex<T>) -> Complex<T>,
{
    if grid.iter().any(|t| !t.is_finite()) {
        return Err(NumericsError::InvalidInput("tau grid must be finite".into()));
    }
    let increasing = grid.windows(2).all(|w| w[1] >= w[0]);
    let decreasing = grid.windows(2).all(|w| w[1] <= w[0]);
    if !(increasing || decreasing) {
        return Err(NumericsError::InvalidInput("tau grid must be ordered".into()));
    }
    let tol = T::of(1e-12).max(T::epsilon() * T::of(100.0));
    let max_steps = 1usize << 24;
    let mut out = Vec::with_capacity(grid.len());
    let mut y = y0;
    if let Some(&first) = grid.first() {
        out.push(y);
        let mut prev = first;
        for &t in &grid[1..] {
            if t != prev {
                let mut steps = 4usize;
                let mut coarse = rk4_span(&rhs, prev, t, y, steps);
                loop {
                    steps *= 2;
                    if steps > max_steps {
                        return Err(NumericsError::StepUnderflow { tau: t.as_f64() });
                    }
                    let fine = rk4_span(&rhs, prev, t, y, steps);
                    let scale = fine.norm().max(T::min_positive_value());
                    let agreed = (fine - coarse).norm() <= tol * scale;
                    coarse = fine;
                    if agreed {
                        break;
                    }
                }
                y = coarse;
            }
            out.push(y);
            prev = t;
        }
    }
    Ok(out)
}

/// [`ode_evolve`] for the linear law `y' = rate * y`.
pub fn ode_evolve_linear<T: Real>(
    rate: Complex<T>,
    y0: Complex<T>,
    grid: &[T],
) -> Result<Vec<Complex<T>>, NumericsError> {
    ode_evolve(move |_, y| rate * y, y0, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn zero_rate_is_constant() {
        let ys = ode_evolve_linear(Complex::new(0.0, 0.0), Complex::new(1.0, 0.0), &[0.0, 1.0, 2.0])
            .unwrap();
        for y in ys {
            assert_abs_diff_eq!(y.re, 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(y.im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn scalar_decay() {
        let ys = ode_evolve_linear(Complex::new(-1.0, 0.0), Complex::new(1.0, 0.0), &[0.0, 1.0])
            .unwrap();
        assert_abs_diff_eq!(ys[1].re, (-1.0f64).exp(), epsilon = 1e-11);
    }

    #[test]
    fn complex_rate() {
        let ys = ode_evolve_linear(Complex::new(1.0, -0.5), Complex::new(1.0, 0.0), &[0.0, 2.0])
            .unwrap();
        let exact = Complex::new(0.0, -1.0).exp() * 2.0f64.exp();
        assert!((ys[1] - exact).norm() / exact.norm() < 1e-9);
    }

    #[test]
    fn nonlinear_rhs() {
        // y' = -y^2, y(0) = 1  =>  y = 1/(1+t)
        let ys = ode_evolve(|_, y: Complex<f64>| -(y * y), Complex::new(1.0, 0.0), &[0.0, 1.0, 3.0])
            .unwrap();
        assert_abs_diff_eq!(ys[2].re, 0.25, epsilon = 1e-10);
    }

    #[test]
    fn unordered_grid_rejected() {
        let err = ode_evolve_linear(Complex::new(1.0, 0.0), Complex::new(1.0, 0.0), &[0.0, 2.0, 1.0])
            .unwrap_err();
        assert!(matches!(err, NumericsError::InvalidInput(_)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn matches_closed_form(re in -10.0f64..10.0, im in -10.0f64..10.0, tau in 0.0f64..10.0) {
            let z = Complex::new(re, im);
            prop_assume!(z.norm() <= 10.0);
            let ys = ode_evolve_linear(z, Complex::new(1.0, 0.0), &[0.0, tau]).unwrap();
            let exact = (z * tau).exp();
            prop_assert!((ys[1] - exact).norm() / exact.norm() < 1e-8);
        }
    }
}
