use num_complex::Complex;

use super::{FormFactor, FriedrichsError, FriedrichsModel};
use crate::numerics::fit::fit_quadratic;
use crate::numerics::{integrate, principal_value, QuadratureSpec};
use crate::Real;

/// `eta_I(w + i0)` on the real axis: the real part comes from the principal
/// value, the imaginary part is the explicit boundary term `pi lambda^2 f^2(w)`.
pub fn boundary_self_energy<T: Real>(
    model: &FriedrichsModel<T>,
    w: T,
    spec: &QuadratureSpec<T>,
) -> Result<Complex<T>, FriedrichsError> {
    let ff = model.form_factor();
    let g2 = model.coupling2();
    let imag = T::PI() * g2 * ff.f2(w);
    let real_cauchy = if !matches!(ff, FormFactor::Tabulated(_)) {
        // The real parts of the closed forms are continuous across the cut,
        // so they are evaluated on the axis itself.
        ff.cauchy_closed(Complex::new(w, T::zero()))
            .map(|c| c.re)
            .unwrap_or_else(T::zero)
    } else {
        let (start, end) = (ff.support_start(), ff.support_end());
        if w > start && w < end {
            principal_value(|x: T| ff.f2(x) / (w - x), start, end, w, spec)?
                .value
                .re
        } else {
            integrate(
                |x: T| Complex::new(ff.f2(x) / (w - x), T::zero()),
                start,
                end,
                spec,
            )?
            .value
            .re
        }
    };
    Ok(Complex::new(w - model.omega0() - g2 * real_cauchy, imag))
}

/// Overlap density `rho(w) = lambda^2 f^2(w) / |eta_I(w + i0)|^2` of the bare
/// level with the continuum eigenstates.
pub fn spectral_density<T: Real>(
    model: &FriedrichsModel<T>,
    w: T,
    spec: &QuadratureSpec<T>,
) -> Result<T, FriedrichsError> {
    if w < T::zero() {
        return Err(FriedrichsError::NegativeEnergy { omega: w.as_f64() });
    }
    if model.is_free() {
        return Err(FriedrichsError::StableState {
            omega0: model.omega0().as_f64(),
        });
    }
    let f2 = model.form_factor().f2(w);
    if f2 == T::zero() {
        return Ok(T::zero());
    }
    let eta = boundary_self_energy(model, w, spec)?;
    if eta.re.is_infinite() || eta.re.is_nan() && w == model.form_factor().support_end() {
        // Logarithmic edge singularity of the self-energy.
        return Ok(T::zero());
    }
    Ok(model.coupling2() * f2 / eta.norm_sqr())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzianFit<T> {
    pub center: T,
    /// Full width at half maximum.
    pub width: T,
    pub max_rel_residual: T,
}

/// Fits a Lorentzian to `rho` on `[center - width, center + width]` by a
/// least-squares parabola through `1/rho`.
pub fn fit_lorentzian<T: Real>(
    model: &FriedrichsModel<T>,
    center: T,
    width: T,
    spec: &QuadratureSpec<T>,
) -> Result<LorentzianFit<T>, FriedrichsError> {
    let n = 41;
    let lo = (center - width).max(T::zero());
    let hi = center + width;
    let mut xs = Vec::with_capacity(n);
    let mut inv = Vec::with_capacity(n);
    for i in 0..n {
        let w = lo + (hi - lo) * T::of(i as f64 / (n - 1) as f64);
        let rho = spectral_density(model, w, spec)?;
        if rho > T::zero() {
            xs.push(w);
            inv.push(T::one() / rho);
        }
    }
    let bad = |reason: &str| FriedrichsError::InvalidParameter {
        field: "lorentzian window",
        reason: reason.into(),
    };
    let fit = fit_quadratic(&xs, &inv).ok_or_else(|| bad("too few positive samples"))?;
    let [c0, c1, c2] = fit.coefficients;
    if !(c2 > T::zero()) {
        return Err(bad("density is not peaked in the window"));
    }
    let c = -c1 / (c2 + c2);
    let half_sq = c0 / c2 - c * c;
    if !(half_sq > T::zero()) {
        return Err(bad("fitted width is not real"));
    }
    let peak_inv = c2 * half_sq;
    Ok(LorentzianFit {
        center: c,
        width: T::of(2.0) * half_sq.sqrt(),
        max_rel_residual: fit.max_abs_residual / peak_inv,
    })
}
