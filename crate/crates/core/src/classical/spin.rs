use super::{PotentialSpec, SpinVector};

/// Closed-form Larmor precession about z: the in-plane spin turns by `qφ`
/// (clockwise for `q > 0`), `S_z` is untouched.
pub fn spin_precession(spec: &PotentialSpec, s0: &SpinVector, phi: f64) -> SpinVector {
    rotate_in_plane(s0, spec.q * phi)
}

pub(crate) fn rotate_in_plane(s0: &SpinVector, angle: f64) -> SpinVector {
    let (s, c) = angle.sin_cos();
    SpinVector { sx: s0.sx * c + s0.sy * s, sy: -s0.sx * s + s0.sy * c, sz: s0.sz }
}

/// Out-of-plane velocity `ż = −(q/Mr)[S_x(0) sin φ − S_y(0) cos φ]`, M = 1.
///
/// Order-q diagnostic only; it never feeds back into the planar motion.
pub fn z_velocity_diagnostic(spec: &PotentialSpec, s0: &SpinVector, r: f64, phi: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    -(spec.q / r) * (s0.sx * s - s0.sy * c)
}
