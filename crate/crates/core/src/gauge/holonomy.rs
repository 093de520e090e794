use std::f64::consts::TAU;

use super::field::{gauge_potential_at, polar_point, FieldParams, Point};
use super::{GaugeError, Mat2};

/// Default number of loop segments.
pub const HOLONOMY_SEGMENTS: usize = 4096;
/// Allowed entrywise change when the segment count is doubled.
pub const HOLONOMY_TOL: f64 = 1e-8;

/// Path-ordered product of `exp(iβ A·Δl)` around the circle of radius
/// `radius` centred on the line charge, traversed counter-clockwise from
/// `φ = 0`. Later segments multiply from the left.
pub fn path_ordered_loop<A>(potential: A, beta: f64, radius: f64, segments: usize) -> Result<Mat2, GaugeError>
where
    A: Fn(Point) -> Result<[Mat2; 3], GaugeError>,
{
    if segments == 0 {
        return Err(GaugeError::Resolution { segments, change: f64::NAN });
    }
    let dphi = TAU / segments as f64;
    let mut u = Mat2::IDENTITY;
    for j in 0..segments {
        // midpoint on the arc, tangent dl = r dφ (−sinφ, cosφ, 0)
        let phi = (j as f64 + 0.5) * dphi;
        let a = potential(polar_point(radius, phi))?;
        let (s, c) = phi.sin_cos();
        let dl = radius * dphi;
        let step = a[0].scale(-s * dl) + a[1].scale(c * dl);
        let (_, coeff) = step.pauli_coefficients();
        u = Mat2::exp_i_pauli([beta * coeff[0], beta * coeff[1], beta * coeff[2]]) * u;
    }
    Ok(u)
}

/// Loop transport of the line-charge potential, checked against a run
/// with twice the segments.
pub fn holonomy_phase(params: &FieldParams, loop_radius: f64) -> Result<Mat2, GaugeError> {
    holonomy_with(params, loop_radius, HOLONOMY_SEGMENTS)
}

pub fn holonomy_with(params: &FieldParams, loop_radius: f64, segments: usize) -> Result<Mat2, GaugeError> {
    if !(loop_radius > 0.0) || !loop_radius.is_finite() {
        return Err(GaugeError::Singular { r: loop_radius });
    }
    let potential = |p: Point| gauge_potential_at(params, p);
    let coarse = path_ordered_loop(potential, params.beta, loop_radius, segments)?;
    let fine = path_ordered_loop(potential, params.beta, loop_radius, 2 * segments)?;
    let change = coarse.max_abs_diff(&fine);
    if !(change < HOLONOMY_TOL) {
        return Err(GaugeError::Resolution { segments, change });
    }
    Ok(fine)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    #[test]
    fn diagonal_phases() {
        for q in [0.0, 0.1, 2.0, 0.37] {
            let p = FieldParams::from_q(q, 0.05).unwrap();
            for radius in [0.3, 1.0, 7.0] {
                let h = holonomy_phase(&p, radius).unwrap();
                let want = Mat2([
                    [Complex64::from_polar(1.0, PI * q), Complex64::new(0.0, 0.0)],
                    [Complex64::new(0.0, 0.0), Complex64::from_polar(1.0, -PI * q)],
                ]);
                assert!(h.max_abs_diff(&want) < 1e-8, "q = {q}");
                assert!(h.is_unitary(1e-12));
            }
        }
        let two = holonomy_phase(&FieldParams::from_q(2.0, 0.05).unwrap(), 1.0).unwrap();
        assert!(two.max_abs_diff(&Mat2::IDENTITY) < 1e-8);
    }

    #[test]
    fn rejects_bad_loops() {
        let p = FieldParams::new(1.0, 0.05).unwrap();
        assert!(holonomy_phase(&p, 0.0).is_err());
        assert!(path_ordered_loop(|x| gauge_potential_at(&p, x), 0.05, 1.0, 0).is_err());
    }

    #[test]
    fn non_commuting_loop_needs_resolution() {
        // a potential with a position-dependent direction: coarse loops disagree
        let beta = 0.8;
        let twisted = |p: Point| -> Result<[Mat2; 3], GaugeError> {
            let phi = p[1].atan2(p[0]);
            let m = Mat2::pauli(0.0, [(3.0 * phi).cos(), (3.0 * phi).sin(), 0.5]);
            Ok([m.scale(-p[1]), m.scale(p[0]), Mat2::ZERO])
        };
        let a = path_ordered_loop(twisted, beta, 1.0, 8).unwrap();
        let b = path_ordered_loop(twisted, beta, 1.0, 16).unwrap();
        assert!(a.max_abs_diff(&b) > 1e-3);
        assert!(a.is_unitary(1e-12));
    }
}
