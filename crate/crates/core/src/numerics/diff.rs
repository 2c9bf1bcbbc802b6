use std::ops::{Add, Mul, Sub};

use num_complex::Complex;

use super::NumericsError;
use crate::Real;

/// Values a finite-difference derivative can be taken of: reals and complex numbers.
pub trait FieldValue<T>:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<T, Output = Self>
{
    fn magnitude(&self) -> T;
    fn is_finite_value(&self) -> bool;
}

impl<T: Real> FieldValue<T> for T {
    fn magnitude(&self) -> T {
        self.abs()
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl<T: Real> FieldValue<T> for Complex<T> {
    fn magnitude(&self) -> T {
        self.norm()
    }
    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative<V, T> {
    pub value: V,
    pub error: T,
}

/// Central-difference derivative of a real function, Richardson-extrapolated
/// over step sizes `h` and `h/2`.
pub fn derivative<T: Real, F>(f: F, x: T, h: T) -> Result<Derivative<T, T>, NumericsError>
where
    F: FnMut(T) -> T,
{
    derivative_of(f, x, h)
}

/// [`derivative`] for any [`FieldValue`], e.g. a complex-valued function of a real variable.
pub fn derivative_of<T: Real, V: FieldValue<T>, F>(
    mut f: F,
    x: T,
    h: T,
) -> Result<Derivative<V, T>, NumericsError>
where
    F: FnMut(T) -> V,
{
    if !(h > T::zero()) {
        return Err(NumericsError::InvalidInput(
            "finite-difference step must be positive".into(),
        ));
    }
    let mut sample = |x: T| {
        let y = f(x);
        if y.is_finite_value() {
            Ok(y)
        } else {
            Err(NumericsError::NonFinite { at: x.as_f64() })
        }
    };
    let mut central = |h: T| -> Result<V, NumericsError> {
        Ok((sample(x + h)? - sample(x - h)?) * (T::one() / (h + h)))
    };
    let coarse = central(h)?;
    let fine = central(h * T::of(0.5))?;
    let value = (fine * T::of(4.0) - coarse) * (T::one() / T::of(3.0));
    Ok(Derivative {
        value,
        error: (value - fine).magnitude(),
    })
}
