use num_complex::Complex;

use super::FriedrichsError;
use crate::numerics::spline::CubicSpline;
use crate::Real;

/// Shape of the coupling between the discrete level and the continuum.
///
/// Everything downstream only needs `f^2(w)`.
#[derive(Debug, Clone, PartialEq)]
pub enum FormFactor<T> {
    /// `f^2(w) = 1` on `[0, cutoff]`, zero above.
    FlatCutoff { cutoff: T },
    /// `f^2(w) = 2 p^2 w / (w^2 + p^2)^2`, normalised to `∫ f^2 = 1`.
    Rational { scale: T },
    /// `f^2` from a table, natural cubic spline between knots, zero outside.
    Tabulated(Tabulated<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated<T> {
    spline: CubicSpline<T>,
}

impl<T: Real> FormFactor<T> {
    pub fn flat_cutoff(cutoff: T) -> Result<Self, FriedrichsError> {
        if !(cutoff > T::zero()) || !cutoff.is_finite() {
            return Err(FriedrichsError::InvalidParameter {
                field: "cutoff",
                reason: "must be positive and finite".into(),
            });
        }
        Ok(Self::FlatCutoff { cutoff })
    }

    pub fn rational(scale: T) -> Result<Self, FriedrichsError> {
        if !(scale > T::zero()) || !scale.is_finite() {
            return Err(FriedrichsError::InvalidParameter {
                field: "scale",
                reason: "must be positive and finite".into(),
            });
        }
        Ok(Self::Rational { scale })
    }

    pub fn tabulated(grid: Vec<T>, values: Vec<T>) -> Result<Self, FriedrichsError> {
        let invalid = |reason: &str| FriedrichsError::InvalidParameter {
            field: "table",
            reason: reason.into(),
        };
        if grid.len() < 2 || grid.len() != values.len() {
            return Err(invalid("needs at least two (w, f^2) rows"));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("energy grid must be strictly increasing"));
        }
        if grid[0] < T::zero() {
            return Err(invalid("energies must be non-negative"));
        }
        if values.iter().any(|v| !(*v >= T::zero()) || !v.is_finite()) {
            return Err(invalid("f^2 values must be finite and non-negative"));
        }
        Ok(Self::Tabulated(Tabulated {
            spline: CubicSpline::natural(grid, values),
        }))
    }

    /// Parses two whitespace- or comma-separated columns `w f^2(w)`; `#` starts a comment.
    pub fn from_table_text(text: &str) -> Result<Self, FriedrichsError> {
        let mut grid = Vec::new();
        let mut values = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            let parse = |s: &str| {
                s.parse::<f64>().map(T::of).map_err(|_| FriedrichsError::InvalidParameter {
                    field: "table",
                    reason: format!("line {}: cannot parse {s:?}", n + 1),
                })
            };
            if cols.len() != 2 {
                return Err(FriedrichsError::InvalidParameter {
                    field: "table",
                    reason: format!("line {}: expected two columns", n + 1),
                });
            }
            grid.push(parse(cols[0])?);
            values.push(parse(cols[1])?);
        }
        Self::tabulated(grid, values)
    }

    /// `f^2(w)` on the real axis; zero for `w < 0`.
    pub fn f2(&self, w: T) -> T {
        if w < T::zero() {
            return T::zero();
        }
        match self {
            Self::FlatCutoff { cutoff } => {
                if w <= *cutoff {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Self::Rational { scale } => {
                let s = *scale * *scale;
                let d = w * w + s;
                T::of(2.0) * s * w / (d * d)
            }
            Self::Tabulated(t) => t.spline.eval(w).max(T::zero()),
        }
    }

    /// Analytic continuation of `f^2` off the real axis, where one exists.
    pub fn f2_continued(&self, z: Complex<T>) -> Option<Complex<T>> {
        match self {
            Self::FlatCutoff { .. } => Some(Complex::new(T::one(), T::zero())),
            Self::Rational { scale } => {
                let s = *scale * *scale;
                let d = z * z + s;
                Some(z * (T::of(2.0) * s) / (d * d))
            }
            Self::Tabulated(_) => None,
        }
    }

    /// Lower end of the support of `f^2`.
    pub fn support_start(&self) -> T {
        match self {
            Self::Tabulated(t) => t.spline.first().max(T::zero()),
            _ => T::zero(),
        }
    }

    /// Upper end of the support of `f^2`; `+inf` for the rational form.
    pub fn support_end(&self) -> T {
        match self {
            Self::FlatCutoff { cutoff } => *cutoff,
            Self::Rational { .. } => T::infinity(),
            Self::Tabulated(t) => t.spline.last(),
        }
    }

    /// Characteristic energy of the band: sets finite-difference steps and breakpoints.
    pub fn energy_scale(&self) -> T {
        match self {
            Self::FlatCutoff { cutoff } => *cutoff,
            Self::Rational { scale } => *scale,
            Self::Tabulated(t) => t.spline.last(),
        }
    }

    /// `∫_0^inf f^2(w) / (z - w) dw` in closed form, for kinds that have one.
    /// The principal logarithm puts the cut along the support on the real axis.
    pub(crate) fn cauchy_closed(&self, z: Complex<T>) -> Option<Complex<T>> {
        match self {
            Self::FlatCutoff { cutoff } => Some((z / (z - *cutoff)).ln()),
            Self::Rational { scale } => Some(rational_cauchy(z, *scale)),
            Self::Tabulated(_) => None,
        }
    }
}

/// `∫_0^inf 2 s w / ((w^2 + s)^2 (z - w)) dw` with `s = p^2`, obtained as
/// `-2 s d/ds` of the elementary integral `∫ w / ((w^2 + s)(z - w)) dw`.
fn rational_cauchy<T: Real>(z: Complex<T>, p: T) -> Complex<T> {
    let s = p * p;
    let half = T::of(0.5);
    let pi = T::PI();
    let log_neg_z = (-z).ln();
    let log_s = s.ln();
    let d = z * z + s;
    let a = z / d;
    let a_s = -a / d;
    let ds = a_s * (log_neg_z - log_s * half) - a / (s + s) + z * a_s * (pi / (p + p))
        - (a * z - T::one()) * (pi / (T::of(4.0) * s * p));
    -ds * (s + s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate, QuadratureSpec};

    #[test]
    fn flat_cutoff_shape() {
        let f = FormFactor::flat_cutoff(10.0).unwrap();
        assert_eq!(f.f2(0.0), 1.0);
        assert_eq!(f.f2(10.0), 1.0);
        assert_eq!(f.f2(10.5), 0.0);
        assert_eq!(f.f2(-1.0), 0.0);
        assert!(FormFactor::flat_cutoff(0.0).is_err());
    }

    #[test]
    fn rational_is_normalised() {
        let f = FormFactor::rational(1.7).unwrap();
        let spec = QuadratureSpec::default();
        let r = integrate(|w: f64| Complex::new(f.f2(w), 0.0), 0.0, f64::INFINITY, &spec).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rational_closed_form_matches_quadrature() {
        let f = FormFactor::rational(1.3).unwrap();
        let spec = QuadratureSpec {
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            ..Default::default()
        };
        for z in [
            Complex::new(1.0, 0.5),
            Complex::new(2.0, -0.3),
            Complex::new(-1.0, -0.2),
            Complex::new(0.5, -1.0),
        ] {
            let closed = f.cauchy_closed(z).unwrap();
            let num = integrate(
                |w: f64| Complex::new(f.f2(w), 0.0) / (z - w),
                0.0,
                f64::INFINITY,
                &spec,
            )
            .unwrap();
            assert!((closed - num.value).norm() < 1e-9, "z = {z}");
        }
    }

    #[test]
    fn table_parsing() {
        let text = "# w f2\n0.0 0.0\n1.0, 0.5\n2.0\t1.0 # peak\n3.0 0.5\n";
        let f = FormFactor::<f64>::from_table_text(text).unwrap();
        assert_eq!(f.f2(1.0), 0.5);
        assert_eq!(f.support_end(), 3.0);
        assert!(f.f2_continued(Complex::new(1.0, -0.1)).is_none());
        assert!(FormFactor::<f64>::from_table_text("0 1\n0 2\n").is_err());
        assert!(FormFactor::<f64>::from_table_text("0 1 3\n").is_err());
        assert!(FormFactor::<f64>::from_table_text("0 1\n1 -2\n").is_err());
    }
}
