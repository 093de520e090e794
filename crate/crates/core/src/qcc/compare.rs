use serde::Serialize;

use super::ridge::RidgeCurve;
use super::QccError;
use crate::classical::{orbit_radius, petal_half_width, OrbitSpec};

/// Rays whose classical radius is below this fraction of the largest one
/// are left out of the statistics.
pub const MIN_RADIUS_FRACTION: f64 = 0.05;
/// Rays within this fraction of the half-petal width from a tip or
/// asymptote are left out as well.
pub const TIP_EXCLUSION: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitComparison {
    /// Global factor multiplying the classical radius (1 without a fit).
    pub scale: f64,
    pub mean_relative_deviation: f64,
    pub max_relative_deviation: f64,
    pub rays_used: usize,
}

/// Relative radial deviation `|r_peak − s r_cl| / (s r_cl)` between a ridge
/// and the closed-form orbit. With `scale_fit` the factor `s` minimises the
/// summed squared relative deviation.
pub fn compare_orbit(ridge: &RidgeCurve, spec: &OrbitSpec, scale_fit: bool) -> Result<OrbitComparison, QccError> {
    let k = spec.k();
    let half = petal_half_width(spec);
    let period = spec.petal_period();
    let mut pairs = Vec::new();
    for p in &ridge.points {
        let Some(r_cl) = orbit_radius(spec, p.phi).value() else { continue };
        // angular distance from the nearest apex
        let offset = (p.phi - spec.phi0 - ((p.phi - spec.phi0) / period).round() * period).abs();
        if r_cl > 0.0 && r_cl.is_finite() && offset <= (1.0 - TIP_EXCLUSION) * half {
            pairs.push((p.r_peak, r_cl));
        }
    }
    if k > 0.0 {
        let top = pairs.iter().map(|&(_, r)| r).fold(0.0, f64::max);
        pairs.retain(|&(_, r)| r > MIN_RADIUS_FRACTION * top);
    }
    if pairs.is_empty() {
        return Err(QccError::NoOverlap);
    }
    let scale = if scale_fit {
        let (su, su2) = pairs.iter().fold((0.0, 0.0), |(a, b), &(rq, rc)| {
            let u = rq / rc;
            (a + u, b + u * u)
        });
        su2 / su
    } else {
        1.0
    };
    let devs: Vec<f64> = pairs.iter().map(|&(rq, rc)| (rq - scale * rc).abs() / (scale * rc)).collect();
    Ok(OrbitComparison {
        scale,
        mean_relative_deviation: devs.iter().sum::<f64>() / devs.len() as f64,
        max_relative_deviation: devs.iter().copied().fold(0.0, f64::max),
        rays_used: devs.len(),
    })
}
