use num_complex::Complex;

use super::NumericsError;
use crate::Real;

/// Settings for [`complex_newton`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSearchConfig<T> {
    /// Starting point; callers that know a better default (e.g. a perturbative
    /// estimate) use it when this is `None`.
    pub initial_guess: Option<Complex<T>>,
    pub step_tol: T,
    pub residual_tol: T,
    pub max_iter: usize,
}

impl<T: Real> Default for RootSearchConfig<T> {
    fn default() -> Self {
        Self {
            initial_guess: None,
            step_tol: T::of(1e-12),
            residual_tol: T::of(1e-12),
            max_iter: 60,
        }
    }
}

impl<T: Real> RootSearchConfig<T> {
    pub fn validate(&self) -> Result<(), NumericsError> {
        if !(self.step_tol > T::zero()) || !(self.residual_tol > T::zero()) {
            return Err(NumericsError::InvalidInput(
                "root-search tolerances must be positive".into(),
            ));
        }
        if self.max_iter < 1 {
            return Err(NumericsError::InvalidInput("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonRoot<T> {
    pub root: Complex<T>,
    pub residual: T,
    pub iterations: usize,
}

/// Newton iteration for an analytic `g: C -> C`.
///
/// The derivative is a central difference along the real axis with
/// `h = 1e-6 * max(1, |z|)`, so `g` may itself be computed numerically.
/// Converged once the last step is within `step_tol` and `|g|` within
/// `residual_tol`.
pub fn complex_newton<T: Real, E, G>(
    mut g: G,
    guess: Complex<T>,
    cfg: &RootSearchConfig<T>,
) -> Result<NewtonRoot<T>, E>
where
    E: From<NumericsError>,
    G: FnMut(Complex<T>) -> Result<Complex<T>, E>,
{
    cfg.validate()?;
    let mut z = guess;
    let mut gz = g(z)?;
    for iteration in 1..=cfg.max_iter {
        let h = T::of(1e-6) * T::one().max(z.norm());
        let dz = Complex::new(h, T::zero());
        let slope = (g(z + dz)? - g(z - dz)?) / (dz + dz);
        if !(slope.norm() > T::epsilon() * T::one().max(gz.norm())) {
            return Err(NumericsError::SingularDerivative {
                re: z.re.as_f64(),
                im: z.im.as_f64(),
            }
            .into());
        }
        let step = gz / slope;
        z = z - step;
        gz = g(z)?;
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(NumericsError::NonFinite { at: z.re.as_f64() }.into());
        }
        if step.norm() <= cfg.step_tol && gz.norm() <= cfg.residual_tol {
            return Ok(NewtonRoot {
                root: z,
                residual: gz.norm(),
                iterations: iteration,
            });
        }
    }
    Err(NumericsError::MaxIterExceeded {
        iterations: cfg.max_iter,
        residual: gz.norm().as_f64(),
    }
    .into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    type C = Complex<f64>;

    fn solve(g: impl Fn(C) -> C, guess: C) -> NewtonRoot<f64> {
        complex_newton::<f64, NumericsError, _>(|z| Ok(g(z)), guess, &RootSearchConfig::default())
            .unwrap()
    }

    #[test]
    fn imaginary_unit() {
        let r = solve(|z| z * z + 1.0, C::new(0.1, 0.9));
        assert_abs_diff_eq!(r.root.re, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.root.im, 1.0, epsilon = 1e-12);
        assert!(r.residual <= 1e-12);
    }

    #[test]
    fn linear_root() {
        let target = C::new(1.0, -0.5);
        let r = solve(|z| z - target, C::new(0.0, 0.0));
        assert!((r.root - target).norm() < 1e-12);
        assert!(r.residual <= 1e-12);
    }

    #[test]
    fn log_two() {
        let r = solve(|z| z.exp() - 2.0, C::new(1.0, 0.0));
        assert_abs_diff_eq!(r.root.re, std::f64::consts::LN_2, epsilon = 1e-12);
        assert_abs_diff_eq!(r.root.im, 0.0, epsilon = 1e-12);
        assert!(r.residual <= 1e-12);
    }

    #[test]
    fn flat_function_is_singular() {
        let err = complex_newton::<f64, NumericsError, _>(
            |_| Ok(C::new(1.0, 0.0)),
            C::new(0.0, 0.0),
            &RootSearchConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, NumericsError::SingularDerivative { .. }));
    }

    #[test]
    fn iteration_budget() {
        let cfg = RootSearchConfig {
            max_iter: 2,
            ..Default::default()
        };
        let err = complex_newton::<f64, NumericsError, _>(
            |z: C| Ok(z.exp() - 2.0),
            C::new(30.0, 0.0),
            &cfg,
        )
        .unwrap_err();
        assert!(matches!(err, NumericsError::MaxIterExceeded { .. }));
    }
}
