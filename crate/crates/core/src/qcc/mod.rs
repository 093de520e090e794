//! Quantum–classical correspondence: where the density of the macroscopic
//! state peaks, how far that is from the classical orbit, and which
//! rotations leave the density unchanged.

mod compare;
mod ridge;
mod symmetry;

use serde::Serialize;
use thiserror::Error;

use crate::classical::OrbitSpec;
use crate::quantum::{density_grid, MacroscopicState, PolarGrid, QuantumError, WaveField};

pub use compare::{compare_orbit, OrbitComparison, MIN_RADIUS_FRACTION, TIP_EXCLUSION};
pub use ridge::{extract_ridge, RayFlag, RidgeCurve, RidgeMeasure, RidgePoint, DENSITY_FLOOR, MIN_RADIAL_SAMPLES};
pub use symmetry::{detect_symmetry, SymmetryScan, SYMMETRY_TOL, TIE_TOL};

/// Largest denominator scanned by default in [`detect_symmetry`].
pub const DEFAULT_MAX_DENOMINATOR: u64 = 24;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QccError {
    #[error("ridge extraction needs at least {need} radial samples, got {got}")]
    TooFewSamples { got: usize, need: usize },
    #[error("ridge and orbit share no angular range")]
    NoOverlap,
    #[error("symmetry scan: {0}")]
    Symmetry(String),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QccReport {
    pub k: String,
    pub gamma: f64,
    pub n: u32,
    pub nu_min: u32,
    pub measure: RidgeMeasure,
    pub scale_fit: bool,
    pub scale: f64,
    pub mean_relative_deviation: f64,
    pub max_relative_deviation: f64,
    pub rays_used: usize,
    pub rays_flagged: usize,
    /// Mean deviation of the ridge taken with the other measure.
    pub alternate_mean_relative_deviation: Option<f64>,
    pub symmetry_order_detected: f64,
    pub symmetry_fraction: (u64, u64),
    pub symmetry_mismatch: f64,
    pub symmetry_ties: Vec<(u64, u64)>,
    pub symmetry_degenerate: bool,
    pub symmetry_order_expected: f64,
}

/// Inputs of one correspondence run.
#[derive(Debug, Clone)]
pub struct QccRun<'a> {
    pub orbit: &'a OrbitSpec,
    pub state: &'a MacroscopicState,
    pub grid: Option<PolarGrid>,
    pub measure: RidgeMeasure,
    pub scale_fit: bool,
    pub max_denominator: u64,
}

pub struct QccOutput {
    pub report: QccReport,
    pub ridge: RidgeCurve,
    pub field: WaveField,
}

/// Density grid, ridge, orbit comparison and symmetry scan in one go.
pub fn run_qcc(run: &QccRun<'_>) -> Result<QccOutput, QccError> {
    let k = &run.orbit.potential.k;
    let grid = match run.grid {
        Some(g) => g,
        None => PolarGrid::default_for(run.state, k.fraction())?,
    };
    let field = density_grid(run.state, &grid)?;
    let ridge = extract_ridge(&field, run.measure)?;
    let cmp = compare_orbit(&ridge, run.orbit, run.scale_fit)?;
    let other = match run.measure {
        RidgeMeasure::Density => RidgeMeasure::RadialWeighted,
        RidgeMeasure::RadialWeighted => RidgeMeasure::Density,
    };
    let alternate = extract_ridge(&field, other)
        .and_then(|r| compare_orbit(&r, run.orbit, run.scale_fit))
        .ok()
        .map(|c| c.mean_relative_deviation);
    let sym = detect_symmetry(&field, run.max_denominator)?;
    let report = QccReport {
        k: k.to_string(),
        gamma: run.orbit.gamma,
        n: run.state.n,
        nu_min: run.state.nu_min,
        measure: run.measure,
        scale_fit: run.scale_fit,
        scale: cmp.scale,
        mean_relative_deviation: cmp.mean_relative_deviation,
        max_relative_deviation: cmp.max_relative_deviation,
        rays_used: cmp.rays_used,
        rays_flagged: ridge.flagged.len(),
        alternate_mean_relative_deviation: alternate,
        symmetry_order_detected: sym.order,
        symmetry_fraction: sym.fraction,
        symmetry_mismatch: sym.mismatch,
        symmetry_ties: sym.ties,
        symmetry_degenerate: sym.degenerate,
        symmetry_order_expected: run.orbit.k().abs(),
    };
    Ok(QccOutput { report, ridge, field })
}
