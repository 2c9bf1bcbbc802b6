//! Entropy of a Gamow state.
//!
//! For a resonance pole `z_R = E_R - i Gamma/2` at inverse temperature `beta`
//! the complex entropy is
//!
//! ```text
//! S = k [1 - ln(beta |z_R|) - i arctan(Gamma / (2 E_R))]
//! ```
//!
//! which reduces to the oscillator entropy `k (1 - ln(beta omega))` as
//! `Gamma -> 0`. Since `E_R > 0`, the same value is `k (1 - Log(beta conj(z_R)))`
//! with the principal logarithm; [`entropy_via_log_identity`] evaluates that
//! form independently. The sign of the imaginary part follows the conjugate
//! pole `conj(z_R) = E_R + i Gamma/2` appearing inside the logarithm.
//!
//! The real part is read as the entropy of the system and the imaginary part
//! as entropy exchanged with the environment; no balance law is implied.

use num_complex::Complex;
use thiserror::Error;

use crate::friedrichs::ResonancePole;
use crate::numerics::{derivative_of, NumericsError};
use crate::Real;

/// Relative step used by [`canonical_entropy`] for `d/d beta`.
pub const BETA_STEP: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThermoError {
    #[error("beta must be positive and finite, got {0}")]
    NonPositiveBeta(f64),
    #[error("temperature must be positive and finite, got {0}")]
    NonPositiveTemperature(f64),
    #[error("k must be positive and finite, got {0}")]
    NonPositiveK(f64),
    #[error("width must be non-negative and finite, got {0}")]
    InvalidWidth(f64),
    #[error("{axis} grid: {reason}")]
    InvalidGrid { axis: &'static str, reason: String },
    /// The trace of `e^{-beta H}` over the Gamow and outgoing vectors has no
    /// finite value: the bracket of a Gamow vector with its own dual diverges.
    #[error("the Gamow-basis trace of exp(-beta H) is ill-defined")]
    IllDefinedBracket,
    #[error("log Z derivative failed: {0}")]
    Derivative(#[from] NumericsError),
}

/// Inverse temperature and entropy unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoPoint<T> {
    beta: T,
    k: T,
}

impl<T: Real> ThermoPoint<T> {
    pub fn new(beta: T, k: T) -> Result<Self, ThermoError> {
        if !(beta > T::zero()) || !beta.is_finite() {
            return Err(ThermoError::NonPositiveBeta(beta.as_f64()));
        }
        if !(k > T::zero()) || !k.is_finite() {
            return Err(ThermoError::NonPositiveK(k.as_f64()));
        }
        Ok(Self { beta, k })
    }

    /// `beta = 1 / (k T)`.
    pub fn from_temperature(temperature: T, k: T) -> Result<Self, ThermoError> {
        if !(temperature > T::zero()) || !temperature.is_finite() {
            return Err(ThermoError::NonPositiveTemperature(temperature.as_f64()));
        }
        if !(k > T::zero()) || !k.is_finite() {
            return Err(ThermoError::NonPositiveK(k.as_f64()));
        }
        Self::new(T::one() / (k * temperature), k)
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn k(&self) -> T {
        self.k
    }

    pub fn temperature(&self) -> T {
        T::one() / (self.k * self.beta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexEntropy<T> {
    pub real_part: T,
    pub imag_part: T,
    pub point: ThermoPoint<T>,
    pub pole: ResonancePole<T>,
}

impl<T: Real> ComplexEntropy<T> {
    pub fn value(&self) -> Complex<T> {
        Complex::new(self.real_part, self.imag_part)
    }
}

/// Closed form `k [1 - ln(beta |z_R|) - i arctan(Gamma / 2 E_R)]`.
pub fn complex_entropy<T: Real>(pole: &ResonancePole<T>, point: &ThermoPoint<T>) -> ComplexEntropy<T> {
    let (e, g) = (pole.e_r(), pole.gamma());
    let modulus = e.hypot(g * T::of(0.5));
    let k = point.k();
    ComplexEntropy {
        real_part: k * (T::one() - (point.beta() * modulus).ln()),
        imag_part: T::zero() - k * (g / (e + e)).atan(),
        point: *point,
        pole: *pole,
    }
}

/// `k (1 - Log(beta conj(z_R)))` with the principal complex logarithm.
pub fn entropy_via_log_identity<T: Real>(
    pole: &ResonancePole<T>,
    point: &ThermoPoint<T>,
) -> ComplexEntropy<T> {
    let s = (Complex::new(T::one(), T::zero()) - (pole.z().conj() * point.beta()).ln()) * point.k();
    ComplexEntropy {
        real_part: s.re,
        imag_part: s.im,
        point: *point,
        pole: *pole,
    }
}

/// `log Z(beta) = -Log(beta conj(z_R))`, the single-mode partition function
/// whose canonical entropy is [`complex_entropy`].
pub fn gamow_log_partition<T: Real>(pole: &ResonancePole<T>, beta: T) -> Complex<T> {
    -(pole.z().conj() * beta).ln()
}

/// Canonical entropy `S = k (1 - beta d/d beta) log Z` with the derivative taken
/// numerically at relative step [`BETA_STEP`]. `log_z` may be complex.
pub fn canonical_entropy<T: Real, F>(log_z: F, point: &ThermoPoint<T>) -> Result<Complex<T>, ThermoError>
where
    F: FnMut(T) -> Complex<T>,
{
    let beta = point.beta();
    let mut log_z = log_z;
    let at = log_z(beta);
    if !(at.re.is_finite() && at.im.is_finite()) {
        return Err(NumericsError::NonFinite { at: beta.as_f64() }.into());
    }
    let d = derivative_of(&mut log_z, beta, beta * T::of(BETA_STEP))?;
    Ok((at - d.value * beta) * point.k())
}

/// The partition function as a trace over the Gamow and outgoing vectors.
/// It has no finite value, so this always fails with
/// [`ThermoError::IllDefinedBracket`]; use [`complex_entropy`].
pub fn naive_partition_function<T: Real>(
    _pole: &ResonancePole<T>,
    _point: &ThermoPoint<T>,
) -> Result<Complex<T>, ThermoError> {
    Err(ThermoError::IllDefinedBracket)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    StrictlyIncreasing,
    StrictlyDecreasing,
    Constant,
    Mixed,
}

impl Monotonicity {
    /// Classifies a sequence against its index order. Fewer than two values is `Constant`.
    pub fn of<T: Real>(values: impl IntoIterator<Item = T>) -> Self {
        let values: Vec<T> = values.into_iter().collect();
        let pairs = || values.windows(2);
        if pairs().all(|w| w[1] == w[0]) {
            Monotonicity::Constant
        } else if pairs().all(|w| w[1] > w[0]) {
            Monotonicity::StrictlyIncreasing
        } else if pairs().all(|w| w[1] < w[0]) {
            Monotonicity::StrictlyDecreasing
        } else {
            Monotonicity::Mixed
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntropyAxis {
    Beta,
    Gamma,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyRow<T> {
    /// `beta` or `Gamma`, depending on the scan axis.
    pub parameter: T,
    pub entropy: ComplexEntropy<T>,
    /// `|closed form - log identity|`.
    pub identity_gap: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyScan<T> {
    pub axis: EntropyAxis,
    pub rows: Vec<EntropyRow<T>>,
    /// Trend of `Re S` along increasing parameter.
    pub real_trend: Monotonicity,
    /// Trend of `Im S` along increasing parameter.
    pub imag_trend: Monotonicity,
}

fn check_grid<T: Real>(axis: &'static str, grid: &[T], allow_zero: bool) -> Result<(), ThermoError> {
    let bad = |reason: &str| ThermoError::InvalidGrid {
        axis,
        reason: reason.into(),
    };
    if grid.is_empty() {
        return Err(bad("empty"));
    }
    if grid
        .iter()
        .any(|&x| !x.is_finite() || x < T::zero() || (!allow_zero && x == T::zero()))
    {
        return Err(bad(if allow_zero {
            "values must be non-negative"
        } else {
            "values must be positive"
        }));
    }
    let up = grid.windows(2).all(|w| w[1] > w[0]);
    let down = grid.windows(2).all(|w| w[1] < w[0]);
    if !(up || down) {
        return Err(bad("values must be strictly ordered"));
    }
    Ok(())
}

fn finish_scan<T: Real>(axis: EntropyAxis, rows: Vec<EntropyRow<T>>) -> EntropyScan<T> {
    let mut ordered: Vec<&EntropyRow<T>> = rows.iter().collect();
    ordered.sort_by(|a, b| a.parameter.partial_cmp(&b.parameter).unwrap());
    let real_trend = Monotonicity::of(ordered.iter().map(|r| r.entropy.real_part));
    let imag_trend = Monotonicity::of(ordered.iter().map(|r| r.entropy.imag_part));
    EntropyScan {
        axis,
        rows,
        real_trend,
        imag_trend,
    }
}

fn row<T: Real>(parameter: T, pole: &ResonancePole<T>, point: &ThermoPoint<T>) -> EntropyRow<T> {
    let entropy = complex_entropy(pole, point);
    let identity_gap = (entropy.value() - entropy_via_log_identity(pole, point).value()).norm();
    EntropyRow {
        parameter,
        entropy,
        identity_gap,
    }
}

/// Entropy across inverse temperatures at a fixed pole. Rows keep grid order.
pub fn entropy_scan_beta<T: Real>(
    pole: &ResonancePole<T>,
    betas: &[T],
    k: T,
) -> Result<EntropyScan<T>, ThermoError> {
    check_grid("beta", betas, false)?;
    let rows = betas
        .iter()
        .map(|&b| Ok(row(b, pole, &ThermoPoint::new(b, k)?)))
        .collect::<Result<Vec<_>, ThermoError>>()?;
    Ok(finish_scan(EntropyAxis::Beta, rows))
}

/// Entropy across widths at fixed `E_R` and thermodynamic point.
pub fn entropy_scan_gamma<T: Real>(
    e_r: T,
    gammas: &[T],
    point: &ThermoPoint<T>,
) -> Result<EntropyScan<T>, ThermoError> {
    check_grid("gamma", gammas, true)?;
    let rows = gammas
        .iter()
        .map(|&g| {
            let pole = ResonancePole::new(e_r, g).map_err(|_| ThermoError::InvalidWidth(g.as_f64()))?;
            Ok(row(g, &pole, point))
        })
        .collect::<Result<Vec<_>, ThermoError>>()?;
    Ok(finish_scan(EntropyAxis::Gamma, rows))
}
