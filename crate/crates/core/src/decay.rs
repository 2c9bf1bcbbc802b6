//! Survival dynamics of the bare level: amplitude, probability, the Gamow
//! exponential law, the Zeno derivative and decay-regime classification.

use num_complex::Complex;
use rayon::prelude::*;
use thiserror::Error;

use crate::friedrichs::{
    perturbative_pole, spectral_density, FriedrichsError, FriedrichsModel, ResonancePole,
};
use crate::numerics::fit::fit_line;
use crate::numerics::{integrate_oscillatory, NumericsError, QuadratureSpec};
use crate::Real;

/// Slack allowed on `P(0) = 1` and `P(t) <= 1`.
pub const PROBABILITY_SLACK: f64 = 1e-8;

/// `|P'(0)|` must stay below this fraction of the natural rate to count as Zeno.
pub const ZENO_RELATIVE_BOUND: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecayError {
    #[error("survival amplitude needs t >= 0, got {0}")]
    NegativeTime(f64),
    #[error("series spans up to t = {available}, regime analysis needs {required}")]
    InsufficientSpan { required: f64, available: f64 },
    #[error("not enough resolved points: {0}")]
    InsufficientResolution(String),
    #[error("survival series invariant violated: {0}")]
    InvariantViolated(String),
    #[error(transparent)]
    Friedrichs(#[from] FriedrichsError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Evaluates `A(t) = ∫ rho(w) e^{-i w t} dw` for a fixed model.
///
/// Quadrature breakpoints bracket the resonance peak, located once from the
/// perturbative pole.
#[derive(Debug, Clone)]
pub struct SurvivalAmplitude<'a, T> {
    model: &'a FriedrichsModel<T>,
    spec: QuadratureSpec<T>,
    breakpoints: Vec<T>,
}

impl<'a, T: Real> SurvivalAmplitude<'a, T> {
    pub fn new(model: &'a FriedrichsModel<T>, spec: &QuadratureSpec<T>) -> Result<Self, DecayError> {
        spec.validate()?;
        let ff = model.form_factor();
        let (start, end) = (ff.support_start(), ff.support_end());
        let mut breakpoints = Vec::new();
        if model.lambda() != T::zero() {
            let guess = perturbative_pole(model, spec)?;
            let (e, g) = (guess.e_r(), guess.gamma());
            for k in [-5.0, -1.0, 0.0, 1.0, 5.0] {
                let p = e + g * T::of(k);
                if p > start && p < end {
                    breakpoints.push(p);
                }
            }
        }
        Ok(Self {
            model,
            spec: *spec,
            breakpoints,
        })
    }

    pub fn at(&self, t: T) -> Result<Complex<T>, DecayError> {
        if !(t >= T::zero()) {
            return Err(DecayError::NegativeTime(t.as_f64()));
        }
        if self.model.lambda() == T::zero() {
            let phase = -(self.model.omega0() * t);
            return Ok(Complex::new(phase.cos(), phase.sin()));
        }
        let ff = self.model.form_factor();
        let model = self.model;
        let spec = &self.spec;
        // Density failures are impossible on the support for a valid model;
        // NaN makes the quadrature report them if they ever happen.
        let rho = |w: T| {
            Complex::new(
                spectral_density(model, w, spec).unwrap_or_else(|_| T::nan()),
                T::zero(),
            )
        };
        let r = integrate_oscillatory(
            rho,
            ff.support_start(),
            ff.support_end(),
            t,
            &self.breakpoints,
            spec,
        )?;
        Ok(r.value)
    }
}

/// `A(t) = <level| e^{-itH} |level>`.
pub fn survival_amplitude<T: Real>(
    model: &FriedrichsModel<T>,
    t: T,
    spec: &QuadratureSpec<T>,
) -> Result<Complex<T>, DecayError> {
    SurvivalAmplitude::new(model, spec)?.at(t)
}

/// Amplitudes over a grid, one result per point, evaluated in parallel and
/// returned in grid order.
pub fn amplitude_series<T: Real>(
    model: &FriedrichsModel<T>,
    times: &[T],
    spec: &QuadratureSpec<T>,
) -> Result<Vec<Result<Complex<T>, DecayError>>, DecayError> {
    let amp = SurvivalAmplitude::new(model, spec)?;
    Ok(times.par_iter().map(|&t| amp.at(t)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalSeries<T> {
    pub times: Vec<T>,
    pub amplitudes: Vec<Complex<T>>,
    pub probabilities: Vec<T>,
}

impl<T: Real> SurvivalSeries<T> {
    /// Builds a series and checks `P(0) = 1` (when `t = 0` is sampled) and `0 <= P <= 1`,
    /// both within [`PROBABILITY_SLACK`].
    pub fn from_amplitudes(times: Vec<T>, amplitudes: Vec<Complex<T>>) -> Result<Self, DecayError> {
        if times.len() != amplitudes.len() {
            return Err(DecayError::InvariantViolated(
                "times and amplitudes differ in length".into(),
            ));
        }
        if times.windows(2).any(|w| !(w[1] >= w[0])) || times.iter().any(|t| !(*t >= T::zero())) {
            return Err(DecayError::InvariantViolated(
                "times must be non-negative and ordered".into(),
            ));
        }
        let probabilities: Vec<T> = amplitudes.iter().map(|a| a.norm_sqr()).collect();
        let slack = T::of(PROBABILITY_SLACK);
        if let Some((i, p)) = probabilities
            .iter()
            .enumerate()
            .find(|(_, p)| !(**p <= T::one() + slack))
        {
            return Err(DecayError::InvariantViolated(format!(
                "P(t = {}) = {} exceeds 1",
                times[i], p
            )));
        }
        if let (Some(&t0), Some(&p0)) = (times.first(), probabilities.first()) {
            if t0 == T::zero() && (p0 - T::one()).abs() > slack {
                return Err(DecayError::InvariantViolated(format!("P(0) = {p0}, not 1")));
            }
        }
        Ok(Self {
            times,
            amplitudes,
            probabilities,
        })
    }

    /// Series from probabilities alone (real non-negative amplitudes `sqrt(P)`).
    pub fn from_probabilities(times: Vec<T>, probabilities: Vec<T>) -> Result<Self, DecayError> {
        let amplitudes = probabilities
            .iter()
            .map(|&p| Complex::new(p.max(T::zero()).sqrt(), T::zero()))
            .collect();
        Self::from_amplitudes(times, amplitudes)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// `P(t) = |A(t)|^2` on an ordered grid of non-negative times.
pub fn survival_probability<T: Real>(
    model: &FriedrichsModel<T>,
    times: &[T],
    spec: &QuadratureSpec<T>,
) -> Result<SurvivalSeries<T>, DecayError> {
    let amplitudes = amplitude_series(model, times, spec)?
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    SurvivalSeries::from_amplitudes(times.to_vec(), amplitudes)
}

/// Purely exponential Gamow amplitude `e^{-i E_R t} e^{-Gamma t / 2}`.
/// Negative `t` is allowed and grows.
pub fn gamow_approximation<T: Real>(pole: &ResonancePole<T>, t: T) -> Complex<T> {
    (Complex::new(T::zero(), -T::one()) * pole.z() * t).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZenoReport<T> {
    /// Estimated `P'(0)`.
    pub derivative: T,
    pub error_estimate: T,
    /// Natural rate the derivative is compared with (normally `Gamma`).
    pub scale: T,
    pub step: T,
    /// `|P'(0)| <= 1e-4 * scale`.
    pub is_zeno: bool,
    /// The error estimate is itself below the Zeno bound.
    pub resolved: bool,
}

/// One-sided Richardson estimate of `P'(0)` for an arbitrary survival
/// probability, compared against `ZENO_RELATIVE_BOUND * scale`.
pub fn zeno_derivative<T: Real, E, P>(mut p: P, step: T, scale: T) -> Result<ZenoReport<T>, E>
where
    E: From<NumericsError>,
    P: FnMut(T) -> Result<T, E>,
{
    if !(step > T::zero()) || !(scale > T::zero()) {
        return Err(NumericsError::InvalidInput("step and scale must be positive".into()).into());
    }
    let p0 = p(T::zero())?;
    let mut forward = |h: T| -> Result<T, E> { Ok((p(h)? - p0) / h) };
    let half = T::of(0.5);
    let d1 = forward(step)?;
    let d2 = forward(step * half)?;
    let d4 = forward(step * half * half)?;
    let two = T::of(2.0);
    let coarse = two * d2 - d1;
    let fine = two * d4 - d2;
    let bound = T::of(ZENO_RELATIVE_BOUND) * scale;
    let error_estimate = (fine - coarse).abs();
    Ok(ZenoReport {
        derivative: fine,
        error_estimate,
        scale,
        step,
        is_zeno: fine.abs() <= bound,
        resolved: error_estimate <= bound,
    })
}

/// Zeno check `P'(0) = 0` for the model's survival probability. The step is a
/// tenth of the inverse band energy and the comparison scale is the
/// golden-rule width.
pub fn zeno_check<T: Real>(
    model: &FriedrichsModel<T>,
    spec: &QuadratureSpec<T>,
) -> Result<ZenoReport<T>, DecayError> {
    let amp = SurvivalAmplitude::new(model, spec)?;
    let pole = perturbative_pole(model, spec)?;
    let scale = if pole.gamma() > T::zero() {
        pole.gamma()
    } else {
        model.omega0()
    };
    let band = model.omega0().max(model.form_factor().energy_scale());
    let step = T::of(0.1) / band;
    zeno_derivative(|t| Ok::<T, DecayError>(amp.at(t)?.norm_sqr()), step, scale)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window<T> {
    pub start: T,
    pub end: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialFit<T> {
    pub window: Window<T>,
    pub gamma: T,
    pub intercept: T,
    /// Largest residual of `ln P` about the fitted line.
    pub max_residual: T,
    pub points: usize,
}

/// Log-linear fit `ln P = intercept - gamma t` over the samples in `[start, end]`
/// that are above `noise_floor`.
pub fn fit_exponential<T: Real>(
    series: &SurvivalSeries<T>,
    start: T,
    end: T,
    noise_floor: T,
) -> Option<ExponentialFit<T>> {
    let (ts, ls): (Vec<T>, Vec<T>) = series
        .times
        .iter()
        .zip(&series.probabilities)
        .filter(|(&t, &p)| t >= start && t <= end && p > noise_floor)
        .map(|(&t, &p)| (t, p.ln()))
        .unzip();
    let fit = fit_line(&ts, &ls)?;
    Some(ExponentialFit {
        window: Window {
            start: ts[0],
            end: ts[ts.len() - 1],
        },
        gamma: -fit.slope,
        intercept: fit.intercept,
        max_residual: fit.max_abs_residual,
        points: ts.len(),
    })
}

/// Resonance energy and width read off a series on `[start, end]`: `E_R` from
/// the slope of the unwrapped phase of `A(t)`, `Gamma` from the log-linear
/// decay of `P(t)`.
pub fn fit_pole_from_series<T: Real>(
    series: &SurvivalSeries<T>,
    start: T,
    end: T,
) -> Option<(T, T)> {
    let exp = fit_exponential(series, start, end, T::zero())?;
    let mut ts = Vec::new();
    let mut phases = Vec::new();
    let two_pi = T::PI() + T::PI();
    let mut offset = T::zero();
    let mut last: Option<T> = None;
    for (&t, a) in series.times.iter().zip(&series.amplitudes) {
        if t < start || t > end {
            continue;
        }
        let raw = a.arg();
        if let Some(prev) = last {
            let mut next = raw + offset;
            while next - prev > T::PI() {
                offset = offset - two_pi;
                next = next - two_pi;
            }
            while next - prev < -T::PI() {
                offset = offset + two_pi;
                next = next + two_pi;
            }
        }
        let unwrapped = raw + offset;
        ts.push(t);
        phases.push(unwrapped);
        last = Some(unwrapped);
    }
    let phase = fit_line(&ts, &phases)?;
    Some((-phase.slope, exp.gamma))
}

/// Knobs for [`classify_regimes`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeOptions<T> {
    /// Probabilities at or below this are treated as unresolved.
    pub noise_floor: T,
    /// Largest allowed `ln P` residual inside the exponential window.
    pub exponential_tolerance: T,
    /// Largest allowed `|P - (1 - c t^2)|` inside the Zeno window.
    pub zeno_tolerance: T,
    /// Largest allowed `ln P` residual of the power-law tail fit.
    pub tail_tolerance: T,
}

impl<T: Real> Default for RegimeOptions<T> {
    fn default() -> Self {
        Self {
            noise_floor: T::of(1e-13),
            exponential_tolerance: T::of(0.01),
            zeno_tolerance: T::of(1e-4),
            tail_tolerance: T::of(0.1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailReport<T> {
    pub window: Option<Window<T>>,
    /// `alpha` in `P ~ t^{-alpha}` fitted on the envelope.
    pub exponent: Option<T>,
    /// `(t, P(t) / e^{-Gamma t})` on the envelope points of the tail window.
    pub envelope_ratio: Vec<(T, T)>,
    /// Last three envelope ratios strictly increase.
    pub ratio_increasing: bool,
    /// Enough points above the noise floor for a fit.
    pub resolved: bool,
    /// Largest sampled time with `P` above the noise floor.
    pub largest_resolved_time: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeResiduals<T> {
    pub zeno: Option<T>,
    pub exponential: T,
    pub tail: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport<T> {
    pub zeno_window: Option<Window<T>>,
    /// `c` of `1 - c t^2` on the Zeno window.
    pub zeno_curvature: Option<T>,
    pub exponential_window: Window<T>,
    /// Width fitted on the final exponential window.
    pub gamma_fit: T,
    /// Width fitted on the seed window `[1/Gamma, 5/Gamma]`.
    pub seed_gamma_fit: T,
    pub tail: TailReport<T>,
    pub fit_residuals: RegimeResiduals<T>,
}

fn zeno_prefix<T: Real>(ts: &[T], ps: &[T]) -> Option<(T, T, T)> {
    // Returns (c, quadratic residual, linear residual) for y = P - 1 on the prefix.
    let (mut s22, mut s2y, mut s11, mut s1y) = (T::zero(), T::zero(), T::zero(), T::zero());
    for (&t, &p) in ts.iter().zip(ps) {
        let y = p - T::one();
        s22 = s22 + t * t * t * t;
        s2y = s2y + t * t * y;
        s11 = s11 + t * t;
        s1y = s1y + t * y;
    }
    if !(s22 > T::zero()) {
        return None;
    }
    let c = -s2y / s22;
    let a = -s1y / s11;
    let (mut quad, mut lin) = (T::zero(), T::zero());
    for (&t, &p) in ts.iter().zip(ps) {
        quad = quad.max((p - (T::one() - c * t * t)).abs());
        lin = lin.max((p - (T::one() - a * t)).abs());
    }
    Some((c, quad, lin))
}

/// Splits a survival series into Zeno, exponential and power-law tail regimes.
///
/// The exponential window is seeded on `[1/Gamma, 5/Gamma]` and grown point by
/// point while the log-linear residual stays within tolerance; the Zeno window
/// is the longest initial stretch where `1 - c t^2` fits and beats a linear
/// law; the tail is a power law fitted to the upper envelope (suffix maxima)
/// of `P` beyond the exponential window.
pub fn classify_regimes<T: Real>(
    series: &SurvivalSeries<T>,
    pole: &ResonancePole<T>,
    opts: &RegimeOptions<T>,
) -> Result<RegimeReport<T>, DecayError> {
    let gamma = pole.gamma();
    if !(gamma > T::zero()) {
        return Err(DecayError::InsufficientResolution(
            "a stable pole has no decay regimes".into(),
        ));
    }
    let required = T::of(25.0) / gamma;
    let available = series.times.last().copied().unwrap_or_else(T::zero);
    if available < required * (T::one() - T::of(1e-9)) {
        return Err(DecayError::InsufficientSpan {
            required: required.as_f64(),
            available: available.as_f64(),
        });
    }
    let ts = &series.times;
    let ps = &series.probabilities;
    let n = ts.len();

    // Zeno window.
    let mut zeno = None;
    let first_pos = ts.iter().position(|&t| t > T::zero()).unwrap_or(n);
    let mut end = first_pos + 3;
    while end <= n {
        match zeno_prefix(&ts[..end], &ps[..end]) {
            Some((c, quad, lin)) if c > T::zero() && quad <= opts.zeno_tolerance && quad < lin => {
                zeno = Some((end, c, quad));
                end += 1;
            }
            _ => break,
        }
    }
    let zeno_end_time = zeno.map(|(e, _, _)| ts[e - 1]);

    // Exponential window, indices into the series.
    let usable = |i: usize| ps[i] > opts.noise_floor && zeno_end_time.is_none_or(|z| ts[i] > z);
    let fit_range = |lo: usize, hi: usize| {
        let (xs, ys): (Vec<T>, Vec<T>) = (lo..=hi)
            .filter(|&i| ps[i] > opts.noise_floor)
            .map(|i| (ts[i], ps[i].ln()))
            .unzip();
        fit_line(&xs, &ys)
    };
    let seed: Vec<usize> = (0..n)
        .filter(|&i| usable(i) && ts[i] >= T::one() / gamma && ts[i] <= T::of(5.0) / gamma)
        .collect();
    if seed.len() < 3 {
        return Err(DecayError::InsufficientResolution(
            "fewer than three resolved samples in [1/Gamma, 5/Gamma]".into(),
        ));
    }
    let (mut lo, mut hi) = (seed[0], seed[seed.len() - 1]);
    let seed_fit = fit_range(lo, hi).ok_or_else(|| {
        DecayError::InsufficientResolution("degenerate seed window".into())
    })?;
    let mut fit = seed_fit;
    loop {
        let mut grew = false;
        while lo > 0 && usable(lo - 1) {
            match fit_range(lo - 1, hi) {
                Some(f) if f.max_abs_residual <= opts.exponential_tolerance => {
                    lo -= 1;
                    fit = f;
                    grew = true;
                }
                _ => break,
            }
        }
        while hi + 1 < n && usable(hi + 1) {
            match fit_range(lo, hi + 1) {
                Some(f) if f.max_abs_residual <= opts.exponential_tolerance => {
                    hi += 1;
                    fit = f;
                    grew = true;
                }
                _ => break,
            }
        }
        if !grew {
            break;
        }
    }
    let exponential_window = Window {
        start: ts[lo],
        end: ts[hi],
    };

    // Tail on the suffix-maxima envelope beyond the exponential window.
    let resolved: Vec<usize> = (hi + 1..n).filter(|&i| ps[i] > opts.noise_floor).collect();
    let largest_resolved_time = (0..n)
        .rev()
        .find(|&i| ps[i] > opts.noise_floor)
        .map(|i| ts[i])
        .unwrap_or_else(T::zero);
    let mut envelope = Vec::new();
    let mut running = T::neg_infinity();
    for &i in resolved.iter().rev() {
        if ps[i] > running {
            envelope.push(i);
            running = ps[i];
        }
    }
    envelope.reverse();
    let mut tail = TailReport {
        window: None,
        exponent: None,
        envelope_ratio: Vec::new(),
        ratio_increasing: false,
        resolved: false,
        largest_resolved_time,
    };
    let mut tail_residual = None;
    if envelope.len() >= 3 {
        let power_fit = |from: usize| {
            let (xs, ys): (Vec<T>, Vec<T>) = envelope[from..]
                .iter()
                .filter(|&&i| ts[i] > T::zero())
                .map(|&i| (ts[i].ln(), ps[i].ln()))
                .unzip();
            fit_line(&xs, &ys)
        };
        let mut start = envelope.len() - 3;
        if let Some(mut best) = power_fit(start) {
            while start > 0 {
                match power_fit(start - 1) {
                    Some(f) if f.max_abs_residual <= opts.tail_tolerance => {
                        start -= 1;
                        best = f;
                    }
                    _ => break,
                }
            }
            let points = &envelope[start..];
            tail.window = Some(Window {
                start: ts[points[0]],
                end: ts[points[points.len() - 1]],
            });
            tail.exponent = Some(-best.slope);
            tail.envelope_ratio = points
                .iter()
                .map(|&i| (ts[i], ps[i] / (-gamma * ts[i]).exp()))
                .collect();
            let r = &tail.envelope_ratio;
            let k = r.len();
            tail.ratio_increasing = r[k - 1].1 > r[k - 2].1 && r[k - 2].1 > r[k - 3].1;
            tail.resolved = true;
            tail_residual = Some(best.max_abs_residual);
        }
    }

    Ok(RegimeReport {
        zeno_window: zeno.map(|(e, _, _)| Window {
            start: T::zero(),
            end: ts[e - 1],
        }),
        zeno_curvature: zeno.map(|(_, c, _)| c),
        exponential_window,
        gamma_fit: -fit.slope,
        seed_gamma_fit: -seed_fit.slope,
        tail,
        fit_residuals: RegimeResiduals {
            zeno: zeno.map(|(_, _, r)| r),
            exponential: fit.max_abs_residual,
            tail: tail_residual,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::friedrichs::{discretize, find_pole, FormFactor};
    use crate::numerics::RootSearchConfig;

    fn flat(lambda: f64) -> FriedrichsModel<f64> {
        FriedrichsModel::new(1.0, lambda, FormFactor::flat_cutoff(10.0).unwrap()).unwrap()
    }

    #[test]
    fn amplitude_at_zero_is_one() {
        let a = survival_amplitude(&flat(0.1), 0.0, &QuadratureSpec::default()).unwrap();
        assert!((a - Complex::new(1.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn free_model_amplitude_is_a_phase() {
        let a = survival_amplitude(&flat(0.0), 2.0, &QuadratureSpec::default()).unwrap();
        assert!((a - Complex::new(0.0, -2.0).exp()).norm() < 1e-15);
    }

    #[test]
    fn negative_time_rejected() {
        let err = survival_amplitude(&flat(0.1), -1.0, &QuadratureSpec::default()).unwrap_err();
        assert_eq!(err, DecayError::NegativeTime(-1.0));
    }

    #[test]
    fn modulus_bounded_on_sweep() {
        let m = flat(0.1);
        let spec = QuadratureSpec::default();
        let gamma = 2.0 * std::f64::consts::PI * 0.01;
        let times: Vec<f64> = (0..=40).map(|i| i as f64 * 0.25 / gamma).collect();
        let series = survival_probability(&m, &times, &spec).unwrap();
        assert!(series.probabilities.iter().all(|&p| p <= 1.0 + 1e-8));
    }

    #[test]
    fn matches_discretised_oracle_mid_window() {
        let m = flat(0.1);
        let spec = QuadratureSpec::default();
        let pole = find_pole(&m, &RootSearchConfig::default(), &spec).unwrap();
        let oracle = discretize(&m, 4000, 12.0).unwrap();
        let t = 2.0 / pole.gamma();
        let p = survival_amplitude(&m, t, &spec).unwrap().norm_sqr();
        let q = oracle.survival_probability(t);
        assert!((p - q).abs() / q < 0.03, "{p} vs {q}");
    }

    #[test]
    fn gamow_law() {
        let pole = ResonancePole::new(1.0, 0.1).unwrap();
        assert_eq!(gamow_approximation(&pole, 0.0), Complex::new(1.0, 0.0));
        let a = gamow_approximation(&pole, 2.0 / 0.1);
        assert!((a.norm() - (-1.0f64).exp()).abs() < 1e-15);
        let half_turn = gamow_approximation(&pole, std::f64::consts::PI);
        assert!(half_turn.re < 0.0 && half_turn.im.abs() < 1e-12);
        assert!(gamow_approximation(&pole, -10.0).norm() > 1.0);
    }

    #[test]
    fn exponential_control_is_not_zeno() {
        let gamma = 0.0628;
        let r = zeno_derivative(|t: f64| Ok::<_, NumericsError>((-gamma * t).exp()), 0.01, gamma)
            .unwrap();
        assert!((r.derivative + gamma).abs() < 1e-8);
        assert!(!r.is_zeno);
    }

    #[test]
    fn model_is_zeno() {
        let r = zeno_check(&flat(0.1), &QuadratureSpec::default()).unwrap();
        assert!(r.is_zeno, "{r:?}");
        assert!(r.derivative.abs() <= 1e-4 * r.scale);
    }

    #[test]
    fn synthetic_exponential_regimes() {
        let gamma = 0.05;
        let times: Vec<f64> = (0..=600).map(|i| i as f64).collect();
        let probs = times.iter().map(|t| (-gamma * t).exp()).collect();
        let series = SurvivalSeries::from_probabilities(times, probs).unwrap();
        let pole = ResonancePole::new(1.0, gamma).unwrap();
        let r = classify_regimes(&series, &pole, &RegimeOptions::default()).unwrap();
        assert!(r.zeno_window.is_none());
        assert_eq!(r.exponential_window.start, 0.0);
        assert!((r.gamma_fit - gamma).abs() < 1e-6);
        assert!(!r.tail.resolved);
    }

    #[test]
    fn short_series_is_rejected() {
        let times: Vec<f64> = (0..=10).map(|i| i as f64).collect();
        let probs = times.iter().map(|t| (-0.05 * t).exp()).collect();
        let series = SurvivalSeries::from_probabilities(times, probs).unwrap();
        let pole = ResonancePole::new(1.0, 0.05).unwrap();
        let err = classify_regimes(&series, &pole, &RegimeOptions::default()).unwrap_err();
        assert!(matches!(err, DecayError::InsufficientSpan { .. }));
    }

    #[test]
    fn series_invariants() {
        let err = SurvivalSeries::from_probabilities(vec![0.0, 1.0], vec![0.9, 0.5]).unwrap_err();
        assert!(matches!(err, DecayError::InvariantViolated(_)));
        let err = SurvivalSeries::from_probabilities(vec![0.0, 1.0], vec![1.0, 1.1]).unwrap_err();
        assert!(matches!(err, DecayError::InvariantViolated(_)));
        assert!(SurvivalSeries::from_probabilities(vec![1.0, 0.0], vec![0.5, 1.0]).is_err());
    }
}
