//! The Friedrichs model: a discrete level `omega0` coupled with strength
//! `lambda` through a form factor `f(w)` to a continuum on `[0, inf)`.
//!
//! The resonance is the zero of the second-sheet continuation of the reduced
//! resolvent
//!
//! ```text
//! eta_I(z)  = z - omega0 - lambda^2 ∫ f^2(w) / (z - w) dw
//! eta_II(z) = eta_I(z) + 2 pi i lambda^2 f^2(z)
//! ```
//!
//! where `eta_II` is reached by crossing the cut from the upper half plane, so
//! its zero `z_R = E_R - i Gamma / 2` lies in the lower half plane.

mod arrowhead;
mod discretize;
mod form_factor;
mod model;
mod spectrum;

pub use discretize::{discretize, discretized_hamiltonian, ArrowheadMatrix, DiscretizedSpectrum};
pub use form_factor::FormFactor;
pub use model::{
    find_pole, perturbative_pole, pole_residual, self_energy, FriedrichsModel, ResonancePole,
    Sheet,
};
pub use spectrum::{boundary_self_energy, fit_lorentzian, spectral_density, LorentzianFit};

use thiserror::Error;

use crate::numerics::NumericsError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FriedrichsError {
    #[error("invalid {field}: {reason}")]
    InvalidParameter { field: &'static str, reason: String },
    #[error("tabulated form factors have no analytic continuation to the second sheet")]
    ContinuationUnavailable,
    #[error("z = {re} lies on the branch cut of the first sheet")]
    OnBranchCut { re: f64 },
    #[error("spectral density requested at negative energy {omega}")]
    NegativeEnergy { omega: f64 },
    #[error("coupling is zero: the level at {omega0} is stable")]
    StableState { omega0: f64 },
    #[error("second-sheet root {re} + {im}i lies in the upper half plane")]
    PoleInUpperHalfPlane { re: f64, im: f64 },
    #[error("pole search did not converge: {0}")]
    NoConvergence(NumericsError),
    #[error("omega_max = {omega_max} truncates the coupling (lambda^2 f^2 = {tail:e})")]
    OmegaMaxTooSmall { omega_max: f64, tail: f64 },
    #[error("eigensolver failure: {0}")]
    Eigensolver(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}
