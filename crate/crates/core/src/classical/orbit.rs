use std::f64::consts::PI;
use std::ops::Range;

use serde::Serialize;

use super::{ClassicalError, OrbitSpec};

/// Radius of the closed-form orbit at one polar angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrbitRadius {
    Defined(f64),
    /// `cos k(φ−φ₀) ≤ 0` with no finite positive radius there.
    OutsideDomain,
}

impl OrbitRadius {
    pub fn value(self) -> Option<f64> {
        match self {
            OrbitRadius::Defined(r) => Some(r),
            OrbitRadius::OutsideDomain => None,
        }
    }
}

/// Zero-energy orbit `r^k = a_c^k cos k(φ−φ₀)`.
///
/// For `k > 0` the petal tips (`cos = 0`) give `r = 0`; for `k < 0` they are
/// asymptotes and fall outside the domain.
pub fn orbit_radius(spec: &OrbitSpec, phi: f64) -> OrbitRadius {
    let k = spec.k();
    let c = (k * (phi - spec.phi0)).cos();
    if c > 0.0 {
        let r = spec.a_c() * c.powf(1.0 / k);
        if r.is_finite() {
            return OrbitRadius::Defined(r);
        }
    } else if c == 0.0 && k > 0.0 {
        return OrbitRadius::Defined(0.0);
    }
    OrbitRadius::OutsideDomain
}

/// The same curve parameterised by the angle `δ = φ − φ_tip` from a petal
/// tip (or, for `k < 0`, an asymptote): `r = a_c sin^{1/k}(|k||δ|)`.
///
/// Unlike [`orbit_radius`] this stays accurate when `|δ|` is far below the
/// spacing of doubles near `φ_tip`.
pub fn orbit_radius_from_tip(spec: &OrbitSpec, delta: f64) -> OrbitRadius {
    let k = spec.k();
    let d = delta.abs();
    if d > PI / k.abs() {
        return OrbitRadius::OutsideDomain;
    }
    let c = (k.abs() * d).sin();
    if c > 0.0 {
        let r = spec.a_c() * c.powf(1.0 / k);
        if r.is_finite() {
            return OrbitRadius::Defined(r);
        }
    } else if k > 0.0 {
        return OrbitRadius::Defined(0.0);
    }
    OrbitRadius::OutsideDomain
}

/// Angular distance from a petal apex to its tip, `π/(2|k|)`.
pub fn petal_half_width(spec: &OrbitSpec) -> f64 {
    PI / (2.0 * spec.k().abs())
}

/// Number of sheets `s` for `k = p/s`, if `k` is an exact rational.
pub fn closure_sheets(spec: &OrbitSpec) -> Option<i64> {
    spec.potential.k.fraction().map(|(_, s)| s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitPoint {
    pub phi: f64,
    pub r: f64,
    pub x: f64,
    pub y: f64,
}

impl OrbitPoint {
    fn new(phi: f64, r: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Self { phi, r, x: r * c, y: r * s }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<OrbitPoint>,
    /// Index ranges of the angle-ordered pieces (one per petal or half petal).
    pub segments: Vec<Range<usize>>,
    /// Angular length covered before the curve repeats.
    pub closure_range: f64,
    pub warning: Option<String>,
}

impl Polyline {
    /// Distance between first and last point, relative to `a_c`.
    pub fn endpoint_gap(&self, spec: &OrbitSpec) -> f64 {
        match (self.points.first(), self.points.last()) {
            (Some(a), Some(b)) => (a.x - b.x).hypot(a.y - b.y) / spec.a_c(),
            _ => 0.0,
        }
    }
}

/// Sample the orbit over its closure range.
///
/// For `k = p/s` the range is `[φ₀, φ₀ + 2πs]`, which holds `|p|` petals;
/// the first and last pieces are half petals meeting at the apex `φ₀`.
/// When `k` carries no exact fraction only the petal around `φ₀` is drawn.
/// Open orbits are cut where `r` would exceed `r_max`.
pub fn orbit_polyline(spec: &OrbitSpec, samples_per_petal: usize, r_max: f64) -> Result<Polyline, ClassicalError> {
    if samples_per_petal < 2 {
        return Err(ClassicalError::InvalidSampling("samples_per_petal must be at least 2".into()));
    }
    if !(r_max > 0.0) || !r_max.is_finite() {
        return Err(ClassicalError::NonPositive { name: "r_max", value: r_max });
    }
    let k = spec.k();
    let a = spec.a_c();
    let period = spec.petal_period();
    let w = petal_half_width(spec);
    // angular half-width actually drawn around each apex
    let reach = if k > 0.0 {
        if r_max >= a {
            w
        } else {
            ((r_max / a).powf(k)).acos() / k
        }
    } else if r_max > a {
        ((r_max / a).powf(k)).acos() / k.abs()
    } else {
        return Ok(Polyline { points: vec![], segments: vec![], closure_range: 0.0, warning: None });
    };

    let (lo, hi, petals, warning) = match spec.potential.k.fraction() {
        Some((p, s)) => {
            let range = 2.0 * PI * s as f64;
            (spec.phi0, spec.phi0 + range, p.unsigned_abs() as usize, None)
        }
        None => (
            spec.phi0 - reach,
            spec.phi0 + reach,
            0,
            Some(format!("k = {} is not an exact fraction; drawing a single petal", spec.potential.k)),
        ),
    };

    let mut points = Vec::new();
    let mut segments = Vec::new();
    for m in 0..=petals {
        let centre = spec.phi0 + m as f64 * period;
        let start = (centre - reach).max(lo);
        let end = (centre + reach).min(hi);
        if end <= start {
            continue;
        }
        let n = ((samples_per_petal as f64) * (end - start) / (2.0 * reach)).ceil().max(2.0) as usize;
        let first = points.len();
        for i in 0..n {
            let phi = if i + 1 == n { end } else { start + (end - start) * i as f64 / (n - 1) as f64 };
            let r = if k > 0.0 && reach == w && (phi - centre).abs() >= w * (1.0 - 1e-15) {
                0.0
            } else {
                match orbit_radius(spec, phi) {
                    OrbitRadius::Defined(r) if r <= r_max * (1.0 + 1e-12) => r.min(r_max),
                    _ => continue,
                }
            };
            points.push(OrbitPoint::new(phi, r));
        }
        if points.len() > first {
            segments.push(first..points.len());
        }
    }
    let closure_range = hi - lo;
    Ok(Polyline { points, segments, closure_range, warning })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::PotentialSpec;
    use crate::rational::ExactReal;
    use proptest::prelude::*;

    fn orbit(k: &str, gamma: f64) -> OrbitSpec {
        OrbitSpec::new(PotentialSpec::with_defaults(k.parse().unwrap()).unwrap(), gamma, 0.0).unwrap()
    }

    #[test]
    fn apex_and_tips() {
        let o = orbit("1", 15.0);
        assert_eq!(orbit_radius(&o, 0.0), OrbitRadius::Defined(1.0 / 15.0));
        let tip = orbit_radius(&o, PI / 2.0).value().unwrap();
        assert!(tip < 1e-16);
        assert_eq!(orbit_radius(&o, PI), OrbitRadius::OutsideDomain);

        let open = orbit("-6", 90.0);
        assert_eq!(orbit_radius(&open, 0.0), OrbitRadius::Defined(open.a_c()));
        let near = orbit_radius(&open, PI / 12.0 - 1e-6).value().unwrap();
        assert!(near > 5.0 * open.a_c());
        assert_eq!(orbit_radius(&open, PI / 12.0 + 1e-3), OrbitRadius::OutsideDomain);
        assert_eq!(orbit_radius(&open, PI / 4.0), OrbitRadius::OutsideDomain);
    }

    #[test]
    fn circle_for_unit_index() {
        let o = orbit("1", 15.0);
        let line = orbit_polyline(&o, 200, 1.0).unwrap();
        let a = o.a_c();
        for p in &line.points {
            let d = (p.x - a / 2.0).hypot(p.y) - a / 2.0;
            assert!(d.abs() < 1e-15, "{d}");
        }
        assert!((line.closure_range - 2.0 * PI).abs() < 1e-15);
        assert!(line.warning.is_none());
    }

    #[test]
    fn four_petals_rotate_into_each_other() {
        let o = orbit("4", 60.0);
        let period = PI / 2.0;
        for i in 0..100 {
            let phi = -PI / 8.0 + PI / 4.0 * (i as f64 + 0.5) / 100.0;
            let r0 = orbit_radius(&o, phi).value().unwrap();
            for m in 1..4 {
                let rm = orbit_radius(&o, phi + m as f64 * period).value().unwrap();
                assert!((r0 - rm).abs() <= 1e-12 * o.a_c());
            }
        }
        let line = orbit_polyline(&o, 64, 10.0).unwrap();
        assert_eq!(line.segments.len(), 5);
    }

    #[test]
    fn seven_thirds_closes_after_six_pi() {
        let o = orbit("7/3", 35.0);
        let line = orbit_polyline(&o, 100, 1.0).unwrap();
        assert!((line.closure_range - 6.0 * PI).abs() < 1e-14);
        assert!(line.endpoint_gap(&o) <= 1e-9);
        // petals 0..=7, the first and last being halves
        assert_eq!(line.segments.len(), 8);
        for seg in &line.segments {
            let phis: Vec<f64> = line.points[seg.clone()].iter().map(|p| p.phi).collect();
            assert!(phis.windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn open_orbits_are_clipped() {
        let o = orbit("-17/4", 63.75);
        let r_max = 20.0 * o.a_c();
        let line = orbit_polyline(&o, 50, r_max).unwrap();
        assert_eq!(line.segments.len(), 18);
        assert!(line.points.iter().all(|p| p.r <= r_max && p.r >= o.a_c() * (1.0 - 1e-12)));
        assert!((line.closure_range - 8.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn inexact_index_draws_one_petal() {
        let p = PotentialSpec::with_defaults(ExactReal::inexact(2.0f64.sqrt())).unwrap();
        let o = OrbitSpec::new(p, 10.0, 0.3).unwrap();
        let line = orbit_polyline(&o, 40, 5.0).unwrap();
        assert!(line.warning.is_some());
        assert_eq!(line.segments.len(), 1);
        assert_eq!(line.points.len(), 40);
    }

    #[test]
    fn rejects_bad_sampling() {
        let o = orbit("1", 15.0);
        assert!(orbit_polyline(&o, 1, 1.0).is_err());
        assert!(orbit_polyline(&o, 10, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn petal_symmetry(kidx in 0usize..6, phi in -20.0f64..20.0, m in -3i32..4) {
            let (ks, g) = [("1", 15.0), ("7/3", 35.0), ("4", 60.0), ("9/2", 67.5), ("-6", 90.0), ("-17/4", 63.75)][kidx];
            let o = orbit(ks, g);
            let shifted = phi + m as f64 * o.petal_period();
            if let (Some(r0), Some(r1)) = (orbit_radius(&o, phi).value(), orbit_radius(&o, shifted).value()) {
                // `shifted` carries its own rounding; allow for it through |dr/dφ| = r |tan kφ|
                let slope = r0 * (o.k() * phi).tan().abs();
                let input_error = 4.0 * f64::EPSILON * (phi.abs() + shifted.abs());
                prop_assert!((r0 - r1).abs() <= 1e-12 * r0 + input_error * slope, "{} {}", r0, r1);
            }
        }
    }
}
