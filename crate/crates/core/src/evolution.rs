//! Thermal and real-time evolution of the Gamow ladder coefficients.
//!
//! The creation operator of the decaying state and the annihilation operator
//! of its growing partner obey `d/dtau A_in = z_R A_in` and
//! `d/dtau A_out = -z_R A_out`, so a coefficient evolves by `e^{+tau z_R}` or
//! `e^{-tau z_R}`. Thermal evolution uses real `tau = beta`; real-time
//! evolution is the Wick rotation `tau = -i t` of the same law, and both go
//! through [`evolve`].

use num_complex::Complex;
use thiserror::Error;

use crate::friedrichs::ResonancePole;
use crate::numerics::{ode_evolve_linear, NumericsError};
use crate::thermo::ThermoPoint;
use crate::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvolutionError {
    #[error("exponent real part {exponent} exceeds the representable range ({limit})")]
    Overflow { exponent: f64, limit: f64 },
    #[error("thermal evolution needs tau >= 0, got {0}")]
    NegativeTau(f64),
    #[error("coefficient is not finite")]
    NonFinite,
    #[error("temperature grid: {0}")]
    InvalidTemperatures(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderMode {
    /// Coefficient of the creation operator of the decaying state.
    InCreation,
    /// Coefficient of the annihilation operator of the growing state.
    OutAnnihilation,
}

impl LadderMode {
    fn sign<T: Real>(self) -> T {
        match self {
            LadderMode::InCreation => T::one(),
            LadderMode::OutAnnihilation => -T::one(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderCoefficient<T> {
    pub mode: LadderMode,
    pub value: Complex<T>,
    /// Accumulated evolution parameter.
    pub tau: Complex<T>,
}

impl<T: Real> LadderCoefficient<T> {
    pub fn new(mode: LadderMode, value: Complex<T>) -> Result<Self, EvolutionError> {
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(EvolutionError::NonFinite);
        }
        Ok(Self {
            mode,
            value,
            tau: Complex::new(T::zero(), T::zero()),
        })
    }
}

/// Largest `|Re exponent|` accepted before the factor is reported as out of range.
pub fn exponent_limit<T: Real>() -> T {
    T::of(700.0).min(T::max_value().ln() - T::of(10.0))
}

/// Propagation factor `e^{± tau z_R}` for `mode`.
pub fn ladder_factor<T: Real>(
    mode: LadderMode,
    pole: &ResonancePole<T>,
    tau: Complex<T>,
) -> Result<Complex<T>, EvolutionError> {
    let exponent = pole.z() * tau * mode.sign::<T>();
    let limit = exponent_limit::<T>();
    if !(exponent.re.abs() <= limit) {
        return Err(EvolutionError::Overflow {
            exponent: exponent.re.as_f64(),
            limit: limit.as_f64(),
        });
    }
    Ok(exponent.exp())
}

/// Evolves by a complex parameter step. Real steps are thermal, `-i t` is real time.
pub fn evolve<T: Real>(
    c: &LadderCoefficient<T>,
    pole: &ResonancePole<T>,
    tau: Complex<T>,
) -> Result<LadderCoefficient<T>, EvolutionError> {
    let value = c.value * ladder_factor(c.mode, pole, tau)?;
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(EvolutionError::NonFinite);
    }
    Ok(LadderCoefficient {
        mode: c.mode,
        value,
        tau: c.tau + tau,
    })
}

/// Thermal evolution by `tau = beta >= 0`.
pub fn thermal_evolve<T: Real>(
    c: &LadderCoefficient<T>,
    pole: &ResonancePole<T>,
    tau: T,
) -> Result<LadderCoefficient<T>, EvolutionError> {
    if !(tau >= T::zero()) {
        return Err(EvolutionError::NegativeTau(tau.as_f64()));
    }
    evolve(c, pole, Complex::new(tau, T::zero()))
}

/// Real-time evolution, `tau = -i t`: the creation coefficient decays as
/// `e^{-Gamma t/2}` and the annihilation coefficient grows as `e^{+Gamma t/2}`.
pub fn time_evolve<T: Real>(
    c: &LadderCoefficient<T>,
    pole: &ResonancePole<T>,
    t: T,
) -> Result<LadderCoefficient<T>, EvolutionError> {
    evolve(c, pole, Complex::new(T::zero(), -t))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotonicityRow<T> {
    pub temperature: T,
    /// `|e^{beta z_R}| = e^{beta E_R}`.
    pub in_factor: T,
    /// `|e^{-beta z_R}| = e^{-beta E_R}`.
    pub out_factor: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityTable<T> {
    pub rows: Vec<MonotonicityRow<T>>,
    pub in_strictly_decreasing: bool,
    pub out_strictly_increasing: bool,
}

/// Thermal factors of both modes over increasing temperatures, `beta = 1/(k T)`.
/// The hotter the bath, the smaller the creation factor.
pub fn temperature_monotonicity<T: Real>(
    pole: &ResonancePole<T>,
    temperatures: &[T],
    k: T,
) -> Result<MonotonicityTable<T>, EvolutionError> {
    if temperatures.is_empty() {
        return Err(EvolutionError::InvalidTemperatures("empty".into()));
    }
    if temperatures.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(EvolutionError::InvalidTemperatures(
            "temperatures must be strictly increasing".into(),
        ));
    }
    let rows = temperatures
        .iter()
        .map(|&temperature| {
            let point = ThermoPoint::from_temperature(temperature, k)
                .map_err(|e| EvolutionError::InvalidTemperatures(e.to_string()))?;
            let tau = Complex::new(point.beta(), T::zero());
            Ok(MonotonicityRow {
                temperature,
                in_factor: ladder_factor(LadderMode::InCreation, pole, tau)?.norm(),
                out_factor: ladder_factor(LadderMode::OutAnnihilation, pole, tau)?.norm(),
            })
        })
        .collect::<Result<Vec<_>, EvolutionError>>()?;
    let in_strictly_decreasing = rows.windows(2).all(|w| w[1].in_factor < w[0].in_factor);
    let out_strictly_increasing = rows.windows(2).all(|w| w[1].out_factor > w[0].out_factor);
    Ok(MonotonicityTable {
        rows,
        in_strictly_decreasing,
        out_strictly_increasing,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeCheck<T> {
    pub in_deviation: T,
    pub out_deviation: T,
}

impl<T: Real> OdeCheck<T> {
    pub fn max_deviation(&self) -> T {
        self.in_deviation.max(self.out_deviation)
    }
}

/// Integrates both ladder equations from a unit coefficient at `tau_grid[0]`
/// and returns the largest deviation from the closed forms on the grid.
pub fn verify_ode_solutions<T: Real>(
    pole: &ResonancePole<T>,
    tau_grid: &[T],
) -> Result<OdeCheck<T>, EvolutionError> {
    let one = Complex::new(T::one(), T::zero());
    let deviation = |mode: LadderMode| -> Result<T, EvolutionError> {
        let numeric = ode_evolve_linear(pole.z() * mode.sign::<T>(), one, tau_grid)?;
        let start = LadderCoefficient::new(mode, one)?;
        let mut worst = T::zero();
        for (&tau, y) in tau_grid.iter().zip(&numeric) {
            let exact = evolve(&start, pole, Complex::new(tau - tau_grid[0], T::zero()))?;
            worst = worst.max((exact.value - *y).norm());
        }
        Ok(worst)
    };
    Ok(OdeCheck {
        in_deviation: deviation(LadderMode::InCreation)?,
        out_deviation: deviation(LadderMode::OutAnnihilation)?,
    })
}
