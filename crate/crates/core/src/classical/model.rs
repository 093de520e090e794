use serde::{Deserialize, Serialize};

use super::ClassicalError;
use crate::rational::ExactReal;

/// Relative tolerance on `|S| = λ`.
pub const SPIN_MAGNITUDE_TOL: f64 = 1e-12;

/// Model parameters: `V(r) = −ϱ/r^{2k+2}` with spin-orbit coupling `q`.
///
/// The potential strength is carried as the dimensionless `2Mϱ/ħ²`
/// (`strength`); with ħ = M = 1 this is `ϱ = strength / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub k: ExactReal,
    pub strength: f64,
    pub q: f64,
    pub lambda: f64,
}

impl PotentialSpec {
    pub fn new(k: ExactReal, strength: f64, q: f64, lambda: f64) -> Result<Self, ClassicalError> {
        let spec = Self { k, strength, q, lambda };
        spec.validate()?;
        Ok(spec)
    }

    /// `strength = 1`, `q = 0.1`, `λ = 1/2`.
    pub fn with_defaults(k: ExactReal) -> Result<Self, ClassicalError> {
        Self::new(k, 1.0, 0.1, 0.5)
    }

    pub fn validate(&self) -> Result<(), ClassicalError> {
        let k = self.k.value();
        if !k.is_finite() {
            return Err(ClassicalError::NonFinite { name: "k" });
        }
        if k == 0.0 {
            return Err(ClassicalError::ZeroPowerIndex);
        }
        positive("strength", self.strength)?;
        positive("lambda", self.lambda)?;
        if !self.q.is_finite() {
            return Err(ClassicalError::NonFinite { name: "q" });
        }
        Ok(())
    }

    pub fn k(&self) -> f64 {
        self.k.value()
    }

    /// ϱ in units ħ = M = 1.
    pub fn rho(&self) -> f64 {
        0.5 * self.strength
    }

    pub fn potential(&self, r: f64) -> f64 {
        -self.rho() * r.powf(-(2.0 * self.k() + 2.0))
    }

    /// dV/dr.
    pub fn potential_slope(&self, r: f64) -> f64 {
        let e = 2.0 * self.k() + 2.0;
        e * self.rho() * r.powf(-(e + 1.0))
    }

    pub fn check_spin(&self, s: &SpinVector) -> Result<(), ClassicalError> {
        let m = s.magnitude();
        if (m - self.lambda).abs() > SPIN_MAGNITUDE_TOL * self.lambda {
            return Err(ClassicalError::SpinMagnitude { got: m, lambda: self.lambda });
        }
        Ok(())
    }
}

fn positive(name: &'static str, v: f64) -> Result<(), ClassicalError> {
    if !v.is_finite() {
        return Err(ClassicalError::NonFinite { name });
    }
    if v <= 0.0 {
        return Err(ClassicalError::NonPositive { name, value: v });
    }
    Ok(())
}

/// A zero-energy orbit: kinetic angular momentum `L_z^K = γħ`, apex angle
/// `φ₀`, and the turning radius `a_c = (strength/γ²)^{1/(2k)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitSpec {
    pub potential: PotentialSpec,
    pub gamma: f64,
    pub phi0: f64,
    a_c: f64,
}

impl OrbitSpec {
    pub fn new(potential: PotentialSpec, gamma: f64, phi0: f64) -> Result<Self, ClassicalError> {
        potential.validate()?;
        positive("gamma", gamma)?;
        if !phi0.is_finite() {
            return Err(ClassicalError::NonFinite { name: "phi0" });
        }
        let a_c = (potential.strength / (gamma * gamma)).powf(1.0 / (2.0 * potential.k()));
        if !(a_c.is_finite() && a_c > 0.0) {
            return Err(ClassicalError::NonFinite { name: "a_c" });
        }
        Ok(Self { potential, gamma, phi0, a_c })
    }

    pub fn a_c(&self) -> f64 {
        self.a_c
    }

    pub fn k(&self) -> f64 {
        self.potential.k()
    }

    /// Angular width between successive apexes, `2π/|k|`.
    pub fn petal_period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.k().abs()
    }
}

/// Classical spin `(S_x, S_y, S_z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinVector {
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
}

impl SpinVector {
    pub fn new(sx: f64, sy: f64, sz: f64) -> Self {
        Self { sx, sy, sz }
    }

    /// `λ · d/|d|`.
    pub fn along(direction: [f64; 3], lambda: f64) -> Self {
        let n = (direction[0].powi(2) + direction[1].powi(2) + direction[2].powi(2)).sqrt();
        Self::new(lambda * direction[0] / n, lambda * direction[1] / n, lambda * direction[2] / n)
    }

    pub fn magnitude(&self) -> f64 {
        (self.sx * self.sx + self.sy * self.sy + self.sz * self.sz).sqrt()
    }

    pub fn in_plane(&self) -> f64 {
        self.sx.hypot(self.sy)
    }

    /// Signed angle by which the in-plane part must rotate *clockwise* to go
    /// from `self` to `other`, i.e. the precession angle `qφ` convention.
    pub fn precession_angle_to(&self, other: &SpinVector) -> f64 {
        let cross = self.sx * other.sy - self.sy * other.sx;
        let dot = self.sx * other.sx + self.sy * other.sy;
        -cross.atan2(dot)
    }
}

/// Phase-space point of the planar motion plus the spin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalState {
    pub r: f64,
    pub phi: f64,
    pub r_dot: f64,
    pub phi_dot: f64,
    pub spin: SpinVector,
    pub t: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(s: &str) -> ExactReal {
        s.parse().unwrap()
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert_eq!(PotentialSpec::new(k("0"), 1.0, 0.1, 0.5), Err(ClassicalError::ZeroPowerIndex));
        assert!(matches!(
            PotentialSpec::new(k("1"), -1.0, 0.1, 0.5),
            Err(ClassicalError::NonPositive { name: "strength", .. })
        ));
        assert!(matches!(
            PotentialSpec::new(k("1"), 1.0, 0.1, 0.0),
            Err(ClassicalError::NonPositive { name: "lambda", .. })
        ));
        let p = PotentialSpec::with_defaults(k("1")).unwrap();
        assert!(OrbitSpec::new(p, 0.0, 0.0).is_err());
    }

    #[test]
    fn turning_radius() {
        let p = PotentialSpec::with_defaults(k("1")).unwrap();
        let o = OrbitSpec::new(p, 15.0, 0.0).unwrap();
        assert!((o.a_c() - 1.0 / 15.0).abs() < 1e-16);
        for (ks, g) in [("4", 60.0), ("7/3", 35.0), ("-6", 90.0), ("-17/4", 63.75)] {
            let o = OrbitSpec::new(PotentialSpec::with_defaults(k(ks)).unwrap(), g, 0.0).unwrap();
            let lhs = o.a_c().powf(2.0 * o.k()) * g * g;
            assert!((lhs - 1.0).abs() < 1e-12, "{ks}: {lhs}");
        }
    }

    #[test]
    fn spin_checks() {
        let p = PotentialSpec::with_defaults(k("1")).unwrap();
        assert!(p.check_spin(&SpinVector::along([1.0, 1.0, 1.0], 0.5)).is_ok());
        assert!(p.check_spin(&SpinVector::new(1.0, 0.0, 0.0)).is_err());
        let a = SpinVector::new(1.0, 0.0, 0.0);
        let b = SpinVector::new(0.0, -1.0, 0.0);
        assert!((a.precession_angle_to(&b) - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }
}
