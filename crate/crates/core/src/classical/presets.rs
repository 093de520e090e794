use serde::Serialize;

use super::{ClassicalError, OrbitSpec, PotentialSpec};
use crate::rational::ExactReal;

/// Quantum number of the superposition used with every preset.
pub const PRESET_N: u32 = 30;

/// A named `(k, γ)` pair.
///
/// Every preset satisfies `γ = |k| n / 2` with `n = 30`, which makes the
/// classical turning radius coincide with the peak of the `n = 30`
/// superposition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Preset {
    pub name: &'static str,
    pub k: ExactReal,
    pub gamma: ExactReal,
    pub closed: bool,
}

impl Preset {
    pub fn orbit(&self, strength: f64, q: f64, lambda: f64, phi0: f64) -> Result<OrbitSpec, ClassicalError> {
        let p = PotentialSpec::new(self.k, strength, q, lambda)?;
        OrbitSpec::new(p, self.gamma.value(), phi0)
    }

    pub fn default_orbit(&self) -> OrbitSpec {
        self.orbit(1.0, 0.1, 0.5, 0.0).expect("preset parameters are valid")
    }
}

pub fn presets() -> Vec<Preset> {
    let p = |name, kn, kd, gn, gd| Preset {
        name,
        k: ExactReal::rational(kn, kd),
        gamma: ExactReal::rational(gn, gd),
        closed: kn > 0,
    };
    vec![
        p("fig1-k1", 1, 1, 15, 1),
        p("fig1-k7over3", 7, 3, 35, 1),
        p("fig1-k4", 4, 1, 60, 1),
        p("fig1-k9over2", 9, 2, 135, 2),
        p("fig1-k17over3", 17, 3, 85, 1),
        p("fig1-k5", 5, 1, 75, 1),
        p("fig2-km6", -6, 1, 90, 1),
        p("fig2-km17over4", -17, 4, 255, 4),
    ]
}

pub fn preset(name: &str) -> Option<Preset> {
    presets().into_iter().find(|p| p.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_match_the_quantum_scale() {
        for p in presets() {
            let want = p.k.value().abs() * PRESET_N as f64 / 2.0;
            assert!((p.gamma.value() - want).abs() < 1e-12, "{}", p.name);
            assert!(p.name.ends_with(&p.k.slug()), "{}", p.name);
        }
    }

    #[test]
    fn lookup() {
        assert_eq!(preset("fig1-k4").unwrap().gamma.value(), 60.0);
        assert!(preset("fig3").is_none());
        assert!(!preset("fig2-km6").unwrap().closed);
    }
}
