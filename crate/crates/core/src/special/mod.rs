//! Special functions and quadrature used throughout the crate.

mod bessel;
mod gamma;
mod quadrature;

pub use bessel::{bessel_j, bessel_j_orders, ASYMPTOTIC_THRESHOLD};
pub use gamma::{gamma_fn, ln_binomial, ln_gamma, POLE_TOLERANCE};
pub use quadrature::{integrate, QuadratureOptions, QuadratureResult, Upper};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialError {
    #[error("{what}: argument {value} outside the domain")]
    Domain { what: &'static str, value: f64 },
    #[error("gamma: pole at {value}")]
    Pole { value: f64 },
    #[error(
        "quadrature did not converge after {evaluations} evaluations (estimate {estimate}, error {error_estimate})"
    )]
    NoConvergence { estimate: f64, error_estimate: f64, evaluations: usize },
    #[error("integrand is not finite at {at}")]
    NonFiniteIntegrand { at: f64 },
    #[error("quadrature tolerances must be positive")]
    InvalidTolerance,
}
