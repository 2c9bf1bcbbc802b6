//! Shared numerical kernel.
//!
//! All routines are pure functions of their arguments and hold no global state.

mod diff;
pub mod fit;
mod ode;
mod quadrature;
mod roots;
pub(crate) mod spline;

pub use diff::{derivative, derivative_of, Derivative, FieldValue};
pub use ode::{ode_evolve, ode_evolve_linear};
pub use quadrature::{
    integrate, integrate_oscillatory, integrate_with_breakpoints, principal_value, Integral,
    QuadratureSpec,
};
pub use roots::{complex_newton, NewtonRoot, RootSearchConfig};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("quadrature did not converge after {subdivisions} subdivisions (estimated error {estimated_error:e})")]
    NonConvergence {
        estimated_error: f64,
        subdivisions: usize,
    },
    #[error("integrand is not finite at x = {at}")]
    NonFinite { at: f64 },
    #[error("pole at c = {pole} coincides with an endpoint of [{a}, {b}]")]
    PoleAtEndpoint { a: f64, b: f64, pole: f64 },
    #[error("Newton iteration exceeded {iterations} iterations (|g| = {residual:e})")]
    MaxIterExceeded { iterations: usize, residual: f64 },
    #[error("derivative vanishes near z = {re} + {im}i")]
    SingularDerivative { re: f64, im: f64 },
    #[error("ODE step size underflow on interval ending at tau = {tau}")]
    StepUnderflow { tau: f64 },
}
