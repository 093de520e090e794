//! Matrix-valued potential and field strength of the spin-orbit coupling
//! around a charged line, gauge transformations and loop transport.

mod field;
mod holonomy;
mod matrix;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use field::{
    covariance_defect, field_strength, field_strength_numeric, field_tensor_numeric, gauge_potential,
    gauge_potential_at, gauge_transform, gauge_transform_at, gauge_unitary, jacobian_step, polar_point,
    tensor_to_components, FieldParams, GaugeFunction, NumericField, Point, TrigGaugeFunction, MAX_RELATIVE_STEP,
};
pub use holonomy::{holonomy_phase, holonomy_with, path_ordered_loop, HOLONOMY_SEGMENTS, HOLONOMY_TOL};
pub use matrix::{GaugeMatrix, Mat2, MatrixParts};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaugeError {
    #[error("r = {r} is on or inside the line-charge singularity")]
    Singular { r: f64 },
    #[error("β = 0 leaves the inhomogeneous term of the gauge transformation undefined")]
    ZeroCoupling,
    #[error("field parameters must be finite")]
    NonFinite,
    #[error("finite-difference step h = {h} needs 0 < 2h < r = {r}")]
    Step { h: f64, r: f64 },
    #[error("loop transport not converged: doubling {segments} segments changed the result by {change:e}")]
    Resolution { segments: usize, change: f64 },
}

/// One exported matrix: `component` is e.g. `"A_x"` or `"B_z"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldRecord {
    pub component: String,
    pub r: f64,
    pub phi: f64,
    pub re: [[f64; 2]; 2],
    pub im: [[f64; 2]; 2],
}

impl FieldRecord {
    pub fn new(component: impl Into<String>, r: f64, phi: f64, m: &Mat2) -> Self {
        let (re, im) = m.parts();
        Self { component: component.into(), r, phi, re, im }
    }
}

/// Potential and field components at one point as six records.
pub fn field_records(params: &FieldParams, r: f64, phi: f64) -> Result<Vec<FieldRecord>, GaugeError> {
    let a = gauge_potential(params, r, phi)?;
    let b = field_strength(params, r, phi)?;
    let names = ["x", "y", "z"];
    let mut out = Vec::with_capacity(6);
    for (i, n) in names.iter().enumerate() {
        out.push(FieldRecord::new(format!("A_{n}"), r, phi, &a[i]));
    }
    for (i, n) in names.iter().enumerate() {
        out.push(FieldRecord::new(format!("B_{n}"), r, phi, &b[i]));
    }
    Ok(out)
}
