//! Zero-energy quantum states: Bessel radial modes, angular modes with the
//! spin phase, the binomial superposition and its density on a polar grid.

mod modes;
mod state;

use thiserror::Error;

use crate::special::SpecialError;

pub use modes::{
    angular_wavefunction, cam_spectrum, is_normalizable, radial_moment, radial_moment_within, radial_norm_quadrature,
    radial_wavefunction, AngularMode, CamLevel, RadialMode, Spinor, SPINOR_NORM_TOL,
};
pub use state::{
    default_nu_min, density_grid, spin_equation_residual, spin_expectation_dynamics, MacroscopicState, ModeTerm,
    PolarGrid, RadialSpacing, WaveField,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("mode (k = {k}, nu = {nu}) is not normalizable")]
    NotNormalizable { k: f64, nu: u32 },
    #[error("no modes between nu_min = {nu_min} and n = {n}")]
    EmptyModeSet { nu_min: u32, n: u32 },
    #[error("spinor norm {norm} differs from 1")]
    SpinorNorm { norm: f64 },
    #[error("grid: {0}")]
    Grid(String),
    #[error("{0}")]
    Parameter(String),
    #[error(transparent)]
    Special(#[from] SpecialError),
}
