//! Numerical toolkit for quantum unstable (Gamow) states.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: adaptive complex quadrature, principal values, complex Newton
//!   iteration, RK4 stepping and Richardson derivatives.
//! * [`friedrichs`]: the Friedrichs model of a bound state coupled to a continuum,
//!   its two-sheet self-energy, the resonance pole and a brute-force
//!   diagonalisation oracle.
//! * [`decay`]: survival amplitude and probability, the Gamow exponential law,
//!   the Zeno derivative and classification of decay regimes.
//! * [`thermo`]: the complex entropy of a resonance and the canonical entropy
//!   functional it derives from.
//! * [`evolution`]: thermal and real-time evolution of the Gamow ladder
//!   coefficients related by the Wick rotation.
//!
//! Every kernel is generic over the scalar type through [`Real`]; the aliases
//! at the crate root fix the scalar to `f64`, which is what the command-line
//! front end uses.

// Negated comparisons reject NaN; quadrature constants are kept at full tabulated precision.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod decay;
pub mod evolution;
pub mod friedrichs;
pub mod numerics;
mod scalar;
pub mod thermo;

pub use num_complex::Complex;
pub use scalar::Real;

pub type Complex64 = Complex<f64>;

pub type QuadratureSpec = numerics::QuadratureSpec<f64>;
pub type RootSearchConfig = numerics::RootSearchConfig<f64>;
pub type FormFactor = friedrichs::FormFactor<f64>;
pub type FriedrichsModel = friedrichs::FriedrichsModel<f64>;
pub type ResonancePole = friedrichs::ResonancePole<f64>;
pub type DiscretizedSpectrum = friedrichs::DiscretizedSpectrum<f64>;
pub type SurvivalSeries = decay::SurvivalSeries<f64>;
pub type RegimeReport = decay::RegimeReport<f64>;
pub type ThermoPoint = thermo::ThermoPoint<f64>;
pub type ComplexEntropy = thermo::ComplexEntropy<f64>;
pub type LadderCoefficient = evolution::LadderCoefficient<f64>;
