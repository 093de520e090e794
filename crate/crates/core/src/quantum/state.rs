use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::modes::{is_normalizable, radial_moment_within, AngularMode, RadialMode, Spinor};
use super::QuantumError;
use crate::classical::PotentialSpec;
use crate::special::{bessel_j_orders, ln_binomial};

/// Smallest `ν` included by default: the least integer `> max(0, 1/k)`.
pub fn default_nu_min(k: f64) -> u32 {
    let bound = if k > 0.0 { 1.0 / k } else { 0.0 };
    bound.floor() as u32 + 1
}

/// One term `w_ν R_ν(r) Y_ν(φ)` of the superposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeTerm {
    pub radial: RadialMode,
    pub angular: AngularMode,
    pub weight: f64,
}

/// `Ψ_n = Σ_ν w_ν R_ν(r) Y_{ν,χ}(φ)` with binomial weights
/// `w_ν ∝ binom(n, ν)^{1/2}` over `ν = ν_min..=n`, renormalised so that
/// `Σ w_ν² = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MacroscopicState {
    pub k: f64,
    pub q: f64,
    pub chi: Spinor,
    pub n: u32,
    pub nu_min: u32,
    /// Orientation: the density is symmetric about `φ = phi0`.
    pub phi0: f64,
    pub terms: Vec<ModeTerm>,
    /// Outer radius of the normalisation integral for states built by
    /// [`MacroscopicState::literal`]; `None` means the half-line.
    pub truncation: Option<f64>,
}

impl MacroscopicState {
    pub fn new(
        spec: &PotentialSpec,
        chi: Spinor,
        n: u32,
        nu_min: Option<u32>,
        phi0: f64,
    ) -> Result<Self, QuantumError> {
        let k = spec.k();
        let nu_min = nu_min.unwrap_or_else(|| default_nu_min(k));
        if n == 0 {
            return Err(QuantumError::Parameter("n must be at least 1".into()));
        }
        if nu_min > n {
            return Err(QuantumError::EmptyModeSet { nu_min, n });
        }
        if !is_normalizable(k, nu_min) {
            return Err(QuantumError::NotNormalizable { k, nu: nu_min });
        }
        if !phi0.is_finite() {
            return Err(QuantumError::Parameter("phi0 must be finite".into()));
        }
        let logs: Vec<f64> = (nu_min..=n).map(|nu| ln_binomial(n, nu)).collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let raw: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
        let total: f64 = raw.iter().sum();
        let mut terms = Vec::with_capacity(raw.len());
        for (i, nu) in (nu_min..=n).enumerate() {
            terms.push(ModeTerm {
                radial: RadialMode::new(k, nu, spec.strength)?,
                angular: AngularMode::new(nu, k, spec.q)?,
                weight: (raw[i] / total).sqrt(),
            });
        }
        Ok(Self { k, q: spec.q, chi, n, nu_min, phi0, terms, truncation: None })
    }

    /// Every order `ν = 0..=n` with weights `(binom(n, ν)/2ⁿ)^{1/2}`. For
    /// `k > 0` each radial mode is normalised on `(0, r_max]`, since the low
    /// orders are not square integrable on the half-line; the density is
    /// only meaningful inside that disc. For `k < 0` all orders normalise
    /// when `k < −2` and `r_max` is not used.
    pub fn literal(spec: &PotentialSpec, chi: Spinor, n: u32, r_max: f64, phi0: f64) -> Result<Self, QuantumError> {
        let k = spec.k();
        if n == 0 {
            return Err(QuantumError::Parameter("n must be at least 1".into()));
        }
        if !phi0.is_finite() {
            return Err(QuantumError::Parameter("phi0 must be finite".into()));
        }
        let truncation = if k > 0.0 {
            if !(r_max > 0.0) || !r_max.is_finite() {
                return Err(QuantumError::Parameter(format!("r_max must be positive and finite, got {r_max}")));
            }
            Some(r_max)
        } else {
            if !is_normalizable(k, 0) {
                return Err(QuantumError::NotNormalizable { k, nu: 0 });
            }
            None
        };
        let ln_half = n as f64 * std::f64::consts::LN_2;
        let mut terms = Vec::with_capacity(n as usize + 1);
        for nu in 0..=n {
            let radial = match truncation {
                Some(r) => RadialMode::truncated(k, nu, spec.strength, r)?,
                None => RadialMode::new(k, nu, spec.strength)?,
            };
            terms.push(ModeTerm {
                radial,
                angular: AngularMode::new(nu, k, spec.q)?,
                weight: (0.5 * (ln_binomial(n, nu) - ln_half)).exp(),
            });
        }
        Ok(Self { k, q: spec.q, chi, n, nu_min: 0, phi0, terms, truncation })
    }

    /// Orbital factor `Σ_ν w_ν R_ν(r) C_j e^{ij(φ−φ₀)}`, the spin-free part
    /// of the amplitude.
    fn orbital(&self, radial: &[f64], phi: f64) -> Complex64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for (t, r) in self.terms.iter().zip(radial) {
            sum += Complex64::from_polar(t.weight * t.angular.c_j * r, t.angular.j * (phi - self.phi0));
        }
        sum
    }

    /// `w_ν R_ν(r)` for every term at one radius, sharing the Bessel recurrence.
    pub fn radial_profile(&self, r: f64) -> Result<Vec<f64>, QuantumError> {
        if !(r > 0.0) {
            return Err(QuantumError::Grid(format!("radius must be positive, got {r}")));
        }
        let first = &self.terms[0].radial;
        let x = first.bessel_argument(r);
        let j = bessel_j_orders(self.n, x)?;
        Ok(self.terms.iter().map(|t| t.radial.norm * j[t.radial.nu as usize] / t.radial.length_scale).collect())
    }

    fn spin_amplitudes(&self, orbital: Complex64, phi: f64) -> [Complex64; 2] {
        let half = 0.5 * self.q * phi;
        [
            orbital * Complex64::from_polar(1.0, half) * self.chi.up,
            orbital * Complex64::from_polar(1.0, -half) * self.chi.down,
        ]
    }

    /// `Ψ_n(r, φ)` as `(up, down)`.
    pub fn evaluate(&self, r: f64, phi: f64) -> Result<[Complex64; 2], QuantumError> {
        let radial = self.radial_profile(r)?;
        Ok(self.spin_amplitudes(self.orbital(&radial, phi), phi))
    }

    pub fn density(&self, r: f64, phi: f64) -> Result<f64, QuantumError> {
        let [u, d] = self.evaluate(r, phi)?;
        Ok(u.norm_sqr() + d.norm_sqr())
    }

    /// Angular interval on which the modes are orthonormal.
    pub fn angular_period(&self) -> f64 {
        2.0 * PI / self.k.abs()
    }

    /// `⟨φ̇⟩ = Σ_ν w_ν² j_ν ⟨r^{−2}⟩_ν`: the kinetic angular momentum
    /// `j` divided by `r²`, averaged over the state. Cross terms drop out by
    /// angular orthogonality.
    pub fn angular_velocity(&self) -> Result<f64, QuantumError> {
        let mut sum = 0.0;
        for t in &self.terms {
            sum += t.weight * t.weight * t.angular.j * radial_moment_within(&t.radial, -2.0, self.truncation)?;
        }
        Ok(sum)
    }

    /// Radius maximising `R²` of the largest-ν mode, by golden-section
    /// search in `ln r` around the Bessel turning point.
    pub fn peak_radius(&self) -> Result<f64, QuantumError> {
        let mode =
            self.terms.last().map(|t| t.radial).ok_or(QuantumError::EmptyModeSet { nu_min: self.nu_min, n: self.n })?;
        let centre = mode.peak_hint().ln();
        let f = |s: f64| -> f64 {
            let x = mode.bessel_argument(s.exp());
            let v = bessel_j_orders(mode.nu, x).map(|j| j[mode.nu as usize]).unwrap_or(0.0);
            v * v
        };
        // bracket the peak on a coarse log grid first
        let mut best = (f64::NEG_INFINITY, centre);
        for i in 0..=400 {
            let s = centre - 4.0 + 8.0 * i as f64 / 400.0;
            let v = f(s);
            if v > best.0 {
                best = (v, s);
            }
        }
        let (mut a, mut b) = (best.1 - 0.02, best.1 + 0.02);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if f(c) >= f(d) {
                b = d;
            } else {
                a = c;
            }
        }
        Ok((0.5 * (a + b)).exp())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RadialSpacing {
    Log,
    Linear,
}

/// Polar sampling grid. `phi` runs over `[phi_start, phi_start + phi_span)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub n_r: usize,
    pub n_phi: usize,
    pub phi_start: f64,
    pub phi_span: f64,
    pub spacing: RadialSpacing,
}

impl PolarGrid {
    pub fn validate(&self) -> Result<(), QuantumError> {
        if !(self.r_min > 0.0) || !(self.r_max > self.r_min) || !self.r_max.is_finite() {
            return Err(QuantumError::Grid(format!("need 0 < r_min < r_max, got [{}, {}]", self.r_min, self.r_max)));
        }
        if self.n_r < 2 || self.n_phi < 1 {
            return Err(QuantumError::Grid("need n_r ≥ 2 and n_phi ≥ 1".into()));
        }
        if !(self.phi_span > 0.0) || !self.phi_span.is_finite() || !self.phi_start.is_finite() {
            return Err(QuantumError::Grid("phi range must be finite and nonempty".into()));
        }
        Ok(())
    }

    pub fn radii(&self) -> Vec<f64> {
        let n = self.n_r - 1;
        (0..self.n_r)
            .map(|i| {
                if i == n {
                    return self.r_max;
                }
                let t = i as f64 / n as f64;
                match self.spacing {
                    RadialSpacing::Log => (self.r_min.ln() + t * (self.r_max / self.r_min).ln()).exp(),
                    RadialSpacing::Linear => self.r_min + t * (self.r_max - self.r_min),
                }
            })
            .collect()
    }

    pub fn angles(&self) -> Vec<f64> {
        (0..self.n_phi).map(|i| self.phi_start + self.phi_span * i as f64 / self.n_phi as f64).collect()
    }

    /// Log-spaced radii over `[1e-3, 10]·r_peak` and angles covering the
    /// closure range `2πs` with a multiple of `|p|` samples, fine enough to
    /// resolve the highest angular frequency of the state.
    pub fn default_for(state: &MacroscopicState, k_fraction: Option<(i64, i64)>) -> Result<Self, QuantumError> {
        let r_peak = state.peak_radius()?;
        let (p, s) = k_fraction.unwrap_or((1, 1));
        let p = p.unsigned_abs().max(1) as usize;
        let s = s.max(1) as usize;
        let spread = (state.n - state.nu_min) as usize;
        let per_petal = (2 * spread + 4).max((360 * s).div_ceil(p));
        Ok(Self {
            r_min: 1e-3 * r_peak,
            r_max: 10.0 * r_peak,
            n_r: 256,
            n_phi: p * per_petal,
            phi_start: state.phi0,
            phi_span: 2.0 * PI * s as f64,
            spacing: RadialSpacing::Log,
        })
    }
}

/// Sampled state on a polar grid, row-major in `r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaveField {
    pub grid: PolarGrid,
    pub r: Vec<f64>,
    pub phi: Vec<f64>,
    pub values: Vec<[Complex64; 2]>,
    pub density: Vec<f64>,
}

impl WaveField {
    pub fn index(&self, i_r: usize, i_phi: usize) -> usize {
        i_r * self.phi.len() + i_phi
    }

    pub fn density_at(&self, i_r: usize, i_phi: usize) -> f64 {
        self.density[self.index(i_r, i_phi)]
    }

    /// Densities along the ray at angle index `i_phi`.
    pub fn ray(&self, i_phi: usize) -> Vec<f64> {
        (0..self.r.len()).map(|i| self.density_at(i, i_phi)).collect()
    }

    /// `∫ |Ψ|² r dr` along each ray (trapezoid rule on the grid nodes).
    pub fn angular_marginal(&self) -> Vec<f64> {
        (0..self.phi.len())
            .map(|m| {
                let mut acc = 0.0;
                for i in 1..self.r.len() {
                    let f0 = self.density_at(i - 1, m) * self.r[i - 1];
                    let f1 = self.density_at(i, m) * self.r[i];
                    acc += 0.5 * (f0 + f1) * (self.r[i] - self.r[i - 1]);
                }
                acc
            })
            .collect()
    }

    /// Probability inside the grid, over one angular period.
    pub fn total_probability(&self, period: f64) -> f64 {
        let marginal = self.angular_marginal();
        let dphi = self.grid.phi_span / self.phi.len() as f64;
        marginal.iter().sum::<f64>() * dphi * period / self.grid.phi_span
    }
}

/// Evaluate the state on every grid node. Rows are filled in parallel;
/// each node is computed independently, so the result does not depend on
/// the thread count.
pub fn density_grid(state: &MacroscopicState, grid: &PolarGrid) -> Result<WaveField, QuantumError> {
    grid.validate()?;
    let r = grid.radii();
    let phi = grid.angles();
    let rows: Vec<Vec<[Complex64; 2]>> = r
        .par_iter()
        .map(|&ri| {
            let radial = state.radial_profile(ri)?;
            Ok(phi.iter().map(|&p| state.spin_amplitudes(state.orbital(&radial, p), p)).collect())
        })
        .collect::<Result<_, QuantumError>>()?;
    let values: Vec<[Complex64; 2]> = rows.into_iter().flatten().collect();
    let density = values.iter().map(|[u, d]| u.norm_sqr() + d.norm_sqr()).collect();
    Ok(WaveField { grid: *grid, r, phi, values, density })
}

/// `(φ, ⟨σ_x⟩, ⟨σ_y⟩, ⟨σ_z⟩)` of the local spinor of `Ψ_n` at radius
/// `r_ref`, sampled at `steps` angles over `[phi0, phi0 + phi_span]`.
pub fn spin_expectation_dynamics(
    state: &MacroscopicState,
    r_ref: f64,
    phi_span: f64,
    steps: usize,
) -> Result<Vec<[f64; 4]>, QuantumError> {
    if steps < 2 {
        return Err(QuantumError::Parameter("steps must be at least 2".into()));
    }
    let radial = state.radial_profile(r_ref)?;
    let mut out = Vec::with_capacity(steps);
    for i in 0..steps {
        let phi = state.phi0 + phi_span * i as f64 / (steps - 1) as f64;
        out.push(spin_at(state, &radial, phi)?);
    }
    Ok(out)
}

fn spin_at(state: &MacroscopicState, radial: &[f64], phi: f64) -> Result<[f64; 4], QuantumError> {
    let [u, d] = state.spin_amplitudes(state.orbital(radial, phi), phi);
    if !(u.norm_sqr() + d.norm_sqr() > 0.0) {
        return Err(QuantumError::Parameter(format!("state vanishes at φ = {phi}")));
    }
    let s = Spinor::expectation_of(u, d);
    Ok([phi, s[0], s[1], s[2]])
}

/// Largest deviation from `d⟨σ_x⟩/dφ = q⟨σ_y⟩`, `d⟨σ_y⟩/dφ = −q⟨σ_x⟩`,
/// `d⟨σ_z⟩/dφ = 0`, using central differences of step `h` at each sample.
pub fn spin_equation_residual(
    state: &MacroscopicState,
    r_ref: f64,
    samples: &[[f64; 4]],
    h: f64,
) -> Result<f64, QuantumError> {
    let radial = state.radial_profile(r_ref)?;
    let mut worst = 0.0f64;
    for s in samples {
        let plus = spin_at(state, &radial, s[0] + h)?;
        let minus = spin_at(state, &radial, s[0] - h)?;
        let d = |i: usize| (plus[i] - minus[i]) / (2.0 * h);
        worst = worst.max((d(1) - state.q * s[2]).abs()).max((d(2) + state.q * s[1]).abs()).max(d(3).abs());
    }
    Ok(worst)
}
