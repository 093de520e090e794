//! Classical zero-energy orbits, their numerical integration and the
//! precession of the classical spin.

mod dynamics;
mod model;
mod orbit;
mod presets;
mod spin;

use thiserror::Error;

pub use dynamics::{
    apex_state, energy, integrate_motion, integrate_motion_with, integrate_petal, integrate_petals, kinetic_energy,
    MotionOptions, PetalChain, Trajectory, TruncationReason,
};
pub use model::{ClassicalState, OrbitSpec, PotentialSpec, SpinVector, SPIN_MAGNITUDE_TOL};
pub use orbit::{
    closure_sheets, orbit_polyline, orbit_radius, orbit_radius_from_tip, petal_half_width, OrbitPoint, OrbitRadius,
    Polyline,
};
pub use presets::{preset, presets, Preset, PRESET_N};
pub use spin::{spin_precession, z_velocity_diagnostic};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassicalError {
    #[error("k must be nonzero")]
    ZeroPowerIndex,
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} must be finite")]
    NonFinite { name: &'static str },
    #[error("spin magnitude {got} does not match lambda = {lambda}")]
    SpinMagnitude { got: f64, lambda: f64 },
    #[error("{0}")]
    InvalidSampling(String),
    #[error("open orbits (k < 0) have no second petal to join")]
    OpenOrbit,
    #[error("integration stopped after {} states: {reason}", partial.len())]
    Truncated { reason: TruncationReason, partial: Trajectory },
}
