use num_complex::Complex;

use super::{FormFactor, FriedrichsError};
use crate::numerics::{
    complex_newton, integrate, integrate_with_breakpoints, principal_value, NumericsError,
    QuadratureSpec, RootSearchConfig,
};
use crate::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct FriedrichsModel<T> {
    omega0: T,
    lambda: T,
    form_factor: FormFactor<T>,
}

impl<T: Real> FriedrichsModel<T> {
    pub fn new(omega0: T, lambda: T, form_factor: FormFactor<T>) -> Result<Self, FriedrichsError> {
        if !(omega0 > T::zero()) || !omega0.is_finite() {
            return Err(FriedrichsError::InvalidParameter {
                field: "omega0",
                reason: format!("must be positive and finite, got {omega0}"),
            });
        }
        if !lambda.is_finite() {
            return Err(FriedrichsError::InvalidParameter {
                field: "lambda",
                reason: "must be finite".into(),
            });
        }
        Ok(Self {
            omega0,
            lambda,
            form_factor,
        })
    }

    pub fn omega0(&self) -> T {
        self.omega0
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn form_factor(&self) -> &FormFactor<T> {
        &self.form_factor
    }

    pub fn with_lambda(&self, lambda: T) -> Result<Self, FriedrichsError> {
        Self::new(self.omega0, lambda, self.form_factor.clone())
    }

    pub(crate) fn coupling2(&self) -> T {
        self.lambda * self.lambda
    }

    pub(crate) fn is_free(&self) -> bool {
        self.lambda == T::zero()
    }

    /// `∫ f^2(w) / (z - w) dw` on the first sheet.
    pub(crate) fn cauchy(
        &self,
        z: Complex<T>,
        spec: &QuadratureSpec<T>,
    ) -> Result<Complex<T>, FriedrichsError> {
        let ff = &self.form_factor;
        let (start, end) = (ff.support_start(), ff.support_end());
        if z.im == T::zero() && z.re >= start && z.re <= end {
            return Err(FriedrichsError::OnBranchCut { re: z.re.as_f64() });
        }
        if let Some(v) = ff.cauchy_closed(z) {
            return Ok(v);
        }
        let mut points = vec![start];
        if z.re > start && z.re < end {
            points.push(z.re);
        }
        points.push(end);
        let r = integrate_with_breakpoints(
            |w: T| Complex::new(ff.f2(w), T::zero()) / (z - w),
            &points,
            spec,
        )?;
        Ok(r.value)
    }
}

/// Resonance pole `z_R = E_R - i Gamma / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonancePole<T> {
    e_r: T,
    gamma: T,
}

impl<T: Real> ResonancePole<T> {
    /// `gamma == 0` is the stable limit.
    pub fn new(e_r: T, gamma: T) -> Result<Self, FriedrichsError> {
        if !(e_r > T::zero()) || !e_r.is_finite() {
            return Err(FriedrichsError::InvalidParameter {
                field: "e_r",
                reason: format!("resonance energy must be positive, got {e_r}"),
            });
        }
        if !(gamma >= T::zero()) || !gamma.is_finite() {
            return Err(FriedrichsError::InvalidParameter {
                field: "gamma",
                reason: format!("width must be non-negative, got {gamma}"),
            });
        }
        Ok(Self { e_r, gamma })
    }

    /// From a complex energy in the closed lower half plane.
    pub fn from_z(z: Complex<T>) -> Result<Self, FriedrichsError> {
        Self::new(z.re, -(z.im + z.im))
    }

    pub fn e_r(&self) -> T {
        self.e_r
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn z(&self) -> Complex<T> {
        Complex::new(self.e_r, -self.gamma * T::of(0.5))
    }
}

/// Riemann sheet of the reduced resolvent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sheet {
    /// Physical sheet, analytic off the support of `f^2`.
    First,
    /// Continuation through the cut from above.
    Second,
}

/// Reduced resolvent `eta(z)` on the requested sheet.
pub fn self_energy<T: Real>(
    model: &FriedrichsModel<T>,
    z: Complex<T>,
    sheet: Sheet,
    spec: &QuadratureSpec<T>,
) -> Result<Complex<T>, FriedrichsError> {
    let free = z - model.omega0;
    if model.is_free() {
        return Ok(free);
    }
    let g2 = model.coupling2();
    match sheet {
        Sheet::First => Ok(free - model.cauchy(z, spec)? * g2),
        Sheet::Second => {
            let f2z = model
                .form_factor
                .f2_continued(z)
                .ok_or(FriedrichsError::ContinuationUnavailable)?;
            let first = free - model.cauchy(z, spec)? * g2;
            Ok(first + Complex::new(T::zero(), T::of(2.0) * T::PI() * g2) * f2z)
        }
    }
}

/// Second-order (golden-rule) estimate of the pole:
/// `E_R = omega0 + lambda^2 PV∫ f^2(w) / (omega0 - w) dw`, `Gamma = 2 pi lambda^2 f^2(omega0)`.
pub fn perturbative_pole<T: Real>(
    model: &FriedrichsModel<T>,
    spec: &QuadratureSpec<T>,
) -> Result<ResonancePole<T>, FriedrichsError> {
    let w0 = model.omega0;
    if model.is_free() {
        return ResonancePole::new(w0, T::zero());
    }
    let ff = &model.form_factor;
    let (start, end) = (ff.support_start(), ff.support_end());
    let integrand = |w: T| ff.f2(w) / (w0 - w);
    let shift = if w0 > start && w0 < end {
        principal_value(integrand, start, end, w0, spec)?.value.re
    } else {
        integrate(|w: T| Complex::new(integrand(w), T::zero()), start, end, spec)?
            .value
            .re
    };
    let g2 = model.coupling2();
    ResonancePole::new(w0 + g2 * shift, T::of(2.0) * T::PI() * g2 * ff.f2(w0))
}

/// Locates the zero of `eta_II` in the lower half plane by complex Newton
/// iteration, starting from `cfg.initial_guess` or the perturbative pole.
///
/// A free model (`lambda = 0`) returns the stable level `(omega0, 0)`.
pub fn find_pole<T: Real>(
    model: &FriedrichsModel<T>,
    cfg: &RootSearchConfig<T>,
    spec: &QuadratureSpec<T>,
) -> Result<ResonancePole<T>, FriedrichsError> {
    if model.is_free() {
        return ResonancePole::new(model.omega0, T::zero());
    }
    if model.form_factor.f2_continued(Complex::new(model.omega0, T::zero())).is_none() {
        return Err(FriedrichsError::ContinuationUnavailable);
    }
    let guess = match cfg.initial_guess {
        Some(z) => z,
        None => perturbative_pole(model, spec)?.z(),
    };
    let root = complex_newton(
        |z| self_energy(model, z, Sheet::Second, spec),
        guess,
        cfg,
    )
    .map_err(|e| match e {
        FriedrichsError::Numerics(
            n @ (NumericsError::MaxIterExceeded { .. }
            | NumericsError::SingularDerivative { .. }
            | NumericsError::NonFinite { .. }),
        ) => FriedrichsError::NoConvergence(n),
        other => other,
    })?;
    let z = root.root;
    if z.im > T::zero() {
        return Err(FriedrichsError::PoleInUpperHalfPlane {
            re: z.re.as_f64(),
            im: z.im.as_f64(),
        });
    }
    ResonancePole::from_z(z)
}

/// `|eta_II(z_R)|`, the residual of a located pole.
pub fn pole_residual<T: Real>(
    model: &FriedrichsModel<T>,
    pole: &ResonancePole<T>,
    spec: &QuadratureSpec<T>,
) -> Result<T, FriedrichsError> {
    Ok(self_energy(model, pole.z(), Sheet::Second, spec)?.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    // Pole of the flat-cutoff model (cutoff 10, omega0 1) from an independent
    // 30-digit mpmath root of eta_II.
    const POLE_L005: (f64, f64) = (0.994_491_677_503_338_4, 0.015_751_933_251_086_317);
    const POLE_L01: (f64, f64) = (0.977_783_647_067_176_8, 0.063_552_023_570_270_87);
    const POLE_L02: (f64, f64) = (0.908_270_807_563_220_0, 0.264_036_201_945_506_2);

    fn flat(lambda: f64, cutoff: f64) -> FriedrichsModel<f64> {
        FriedrichsModel::new(1.0, lambda, FormFactor::flat_cutoff(cutoff).unwrap()).unwrap()
    }

    fn spec() -> QuadratureSpec<f64> {
        QuadratureSpec::default()
    }

    #[test]
    fn free_model_self_energy() {
        let m = flat(0.0, 10.0);
        let z = Complex::new(2.0, -0.7);
        for sheet in [Sheet::First, Sheet::Second] {
            assert_eq!(self_energy(&m, z, sheet, &spec()).unwrap(), z - 1.0);
        }
    }

    #[test]
    fn flat_cutoff_first_sheet() {
        // 1+0.5i - 1 - 0.01 ln(z/(z-10)) from mpmath.
        let expected = Complex::new(0.020_871_936_349_478_186, 0.526_224_465_393_432_7);
        let m = flat(0.1, 10.0);
        let eta = self_energy(&m, Complex::new(1.0, 0.5), Sheet::First, &spec()).unwrap();
        assert!((eta - expected).norm() < 1e-14);
    }

    #[test]
    fn sheet_difference_is_discontinuity() {
        let m = flat(0.1, 10.0);
        let z = Complex::new(3.0, -0.2);
        let one = self_energy(&m, z, Sheet::First, &spec()).unwrap();
        let two = self_energy(&m, z, Sheet::Second, &spec()).unwrap();
        let jump = Complex::new(0.0, 2.0 * std::f64::consts::PI * 0.01);
        assert!((two - one - jump).norm() < 1e-14);
    }

    #[test]
    fn branch_cut_is_rejected() {
        let m = flat(0.1, 10.0);
        let err = self_energy(&m, Complex::new(2.0, 0.0), Sheet::First, &spec()).unwrap_err();
        assert!(matches!(err, FriedrichsError::OnBranchCut { .. }));
        assert!(self_energy(&m, Complex::new(12.0, 0.0), Sheet::First, &spec()).is_ok());
    }

    #[test]
    fn tabulated_has_no_second_sheet() {
        let ff = FormFactor::tabulated(vec![0.0, 5.0, 10.0], vec![1.0, 1.0, 1.0]).unwrap();
        let m = FriedrichsModel::new(1.0, 0.1, ff).unwrap();
        let err = self_energy(&m, Complex::new(1.0, -0.1), Sheet::Second, &spec()).unwrap_err();
        assert_eq!(err, FriedrichsError::ContinuationUnavailable);
        let err = find_pole(&m, &RootSearchConfig::default(), &spec()).unwrap_err();
        assert_eq!(err, FriedrichsError::ContinuationUnavailable);
    }

    #[test]
    fn tabulated_first_sheet_matches_flat() {
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.5).collect();
        let ones = vec![1.0; grid.len()];
        let tab = FriedrichsModel::new(1.0, 0.1, FormFactor::tabulated(grid, ones).unwrap()).unwrap();
        let z = Complex::new(2.5, 0.3);
        let a = self_energy(&tab, z, Sheet::First, &spec()).unwrap();
        let b = self_energy(&flat(0.1, 10.0), z, Sheet::First, &spec()).unwrap();
        assert!((a - b).norm() < 1e-10);
    }

    #[test]
    fn perturbative_estimates() {
        let free = perturbative_pole(&flat(0.0, 10.0), &spec()).unwrap();
        assert_eq!((free.e_r(), free.gamma()), (1.0, 0.0));

        let p = perturbative_pole(&flat(0.1, 10.0), &spec()).unwrap();
        assert_abs_diff_eq!(p.gamma(), 2.0 * std::f64::consts::PI * 0.01, epsilon = 1e-15);
        // PV ∫_0^10 dw/(1-w) = -ln 9
        assert_abs_diff_eq!(p.e_r(), 1.0 - 0.01 * 9.0f64.ln(), epsilon = 1e-10);

        let sym = perturbative_pole(&flat(0.1, 2.0), &spec()).unwrap();
        assert_abs_diff_eq!(sym.e_r(), 1.0, epsilon = 1e-11);
    }

    #[test]
    fn pole_matches_high_precision_reference() {
        for (lambda, (e, g)) in [(0.05, POLE_L005), (0.1, POLE_L01), (0.2, POLE_L02)] {
            let pole = find_pole(&flat(lambda, 10.0), &RootSearchConfig::default(), &spec()).unwrap();
            assert_abs_diff_eq!(pole.e_r(), e, epsilon = 1e-11);
            assert_abs_diff_eq!(pole.gamma(), g, epsilon = 1e-11);
        }
    }

    #[test]
    fn free_model_pole_is_stable() {
        let pole = find_pole(&flat(0.0, 10.0), &RootSearchConfig::default(), &spec()).unwrap();
        assert_eq!((pole.e_r(), pole.gamma()), (1.0, 0.0));
    }

    #[test]
    fn golden_rule_scaling() {
        let cfg = RootSearchConfig::default();
        let g = |l: f64| find_pole(&flat(l, 10.0), &cfg, &spec()).unwrap().gamma();
        let ratio = g(0.1) / g(0.05);
        assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio}");
        for l in [0.05, 0.1, 0.2] {
            let golden = 2.0 * std::f64::consts::PI * l * l;
            assert!((g(l) - golden).abs() / golden <= 10.0 * l * l);
        }
    }

    #[test]
    fn rational_pole() {
        let m = FriedrichsModel::new(1.0, 0.1, FormFactor::rational(1.0).unwrap()).unwrap();
        let pole = find_pole(&m, &RootSearchConfig::default(), &spec()).unwrap();
        assert!(pole_residual(&m, &pole, &spec()).unwrap() <= 1e-12);
        let golden = 2.0 * std::f64::consts::PI * 0.01 * m.form_factor().f2(1.0);
        assert!((pole.gamma() - golden).abs() / golden < 0.1);
    }

    #[test]
    fn upper_half_plane_root_is_reported() {
        // eta_II has no zero above the axis; Newton started there must not
        // silently return a conjugated pole.
        let m = flat(0.1, 10.0);
        let cfg = RootSearchConfig {
            initial_guess: Some(Complex::new(0.98, 0.03)),
            ..Default::default()
        };
        match find_pole(&m, &cfg, &spec()) {
            Ok(p) => assert!(p.gamma() > 0.0),
            Err(e) => assert!(matches!(
                e,
                FriedrichsError::PoleInUpperHalfPlane { .. } | FriedrichsError::NoConvergence(_)
            )),
        }
    }

    #[test]
    fn invalid_models() {
        let ff = FormFactor::flat_cutoff(10.0).unwrap();
        let err = FriedrichsModel::new(-1.0, 0.1, ff.clone()).unwrap_err();
        assert!(matches!(err, FriedrichsError::InvalidParameter { field: "omega0", .. }));
        assert!(ResonancePole::new(1.0, -0.1).is_err());
        assert!(ResonancePole::new(0.0, 0.1).is_err());
    }
}
