use serde::{Deserialize, Serialize};

use super::QccError;
use crate::quantum::WaveField;

/// Densities below this are treated as zero.
pub const DENSITY_FLOOR: f64 = 1e-300;
/// Minimum radial samples per ray.
pub const MIN_RADIAL_SAMPLES: usize = 64;

/// Quantity whose radial maximum defines the ridge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RidgeMeasure {
    /// `|Ψ|²`
    #[default]
    Density,
    /// `r |Ψ|²`, the radial probability per unit `r`
    RadialWeighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RidgePoint {
    pub phi: f64,
    pub r_peak: f64,
    pub density_peak: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RayFlag {
    /// every sample below [`DENSITY_FLOOR`]
    Empty,
    /// no unique maximum: the ray is flat
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RidgeCurve {
    pub measure: RidgeMeasure,
    pub points: Vec<RidgePoint>,
    /// `(ray index, reason)` for skipped rays
    pub flagged: Vec<(usize, RayFlag)>,
}

/// Per-ray global maximum of the chosen measure, refined by a parabola
/// through the three samples around it in `ln r`. Ties go to the smaller
/// radius.
pub fn extract_ridge(field: &WaveField, measure: RidgeMeasure) -> Result<RidgeCurve, QccError> {
    let nr = field.r.len();
    if nr < MIN_RADIAL_SAMPLES {
        return Err(QccError::TooFewSamples { got: nr, need: MIN_RADIAL_SAMPLES });
    }
    let mut points = Vec::new();
    let mut flagged = Vec::new();
    for (m, &phi) in field.phi.iter().enumerate() {
        let rho = field.ray(m);
        let value = |i: usize| match measure {
            RidgeMeasure::Density => rho[i],
            RidgeMeasure::RadialWeighted => rho[i] * field.r[i],
        };
        let mut best = 0;
        for i in 1..nr {
            if value(i) > value(best) {
                best = i;
            }
        }
        if rho.iter().all(|&d| d <= DENSITY_FLOOR) {
            flagged.push((m, RayFlag::Empty));
            continue;
        }
        let top = value(best);
        let low = (0..nr).map(value).fold(f64::INFINITY, f64::min);
        if top - low <= 1e-12 * top {
            flagged.push((m, RayFlag::Degenerate));
            continue;
        }
        let (r_peak, peak) = if best == 0 || best + 1 == nr {
            (field.r[best], top)
        } else {
            refine(
                [field.r[best - 1].ln(), field.r[best].ln(), field.r[best + 1].ln()],
                [value(best - 1), top, value(best + 1)],
            )
        };
        let density_peak = match measure {
            RidgeMeasure::Density => peak,
            RidgeMeasure::RadialWeighted => peak / r_peak,
        };
        points.push(RidgePoint { phi, r_peak, density_peak });
    }
    Ok(RidgeCurve { measure, points, flagged })
}

/// Vertex of the parabola through three points, as `(exp(s), value)`.
fn refine(s: [f64; 3], v: [f64; 3]) -> (f64, f64) {
    let (d0, d1) = (s[1] - s[0], s[2] - s[1]);
    let slope0 = (v[1] - v[0]) / d0;
    let slope1 = (v[2] - v[1]) / d1;
    let curvature = (slope1 - slope0) / (0.5 * (d0 + d1));
    if !(curvature < 0.0) {
        return (s[1].exp(), v[1]);
    }
    // slope at s[1] from the parabola
    let mid_slope = (slope0 * d1 + slope1 * d0) / (d0 + d1);
    let shift = (-mid_slope / curvature).clamp(-d0, d1);
    ((s[1] + shift).exp(), v[1] + mid_slope * shift + 0.5 * curvature * shift * shift)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola_vertex() {
        let f = |s: f64| 3.0 - (s - 0.3).powi(2);
        let (r, v) = refine([0.0, 0.5, 1.2], [f(0.0), f(0.5), f(1.2)]);
        assert!((r.ln() - 0.3).abs() < 1e-14);
        assert!((v - 3.0).abs() < 1e-14);
    }
}
