use std::f64::consts::PI;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::QuantumError;
use crate::classical::PotentialSpec;
use crate::special::{bessel_j, integrate, ln_gamma, QuadratureOptions};

/// Tolerance on `|up|² + |down|² = 1`.
pub const SPINOR_NORM_TOL: f64 = 1e-12;

/// Two-component spin state in the σ_z basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spinor {
    pub up: Complex64,
    pub down: Complex64,
}

impl Spinor {
    pub fn new(up: Complex64, down: Complex64) -> Result<Self, QuantumError> {
        let norm = up.norm_sqr() + down.norm_sqr();
        if !((norm - 1.0).abs() <= SPINOR_NORM_TOL) {
            return Err(QuantumError::SpinorNorm { norm });
        }
        Ok(Self { up, down })
    }

    pub fn normalized(up: Complex64, down: Complex64) -> Result<Self, QuantumError> {
        let n = (up.norm_sqr() + down.norm_sqr()).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(QuantumError::SpinorNorm { norm: n * n });
        }
        Ok(Self { up: up / n, down: down / n })
    }

    pub fn plus() -> Self {
        Self { up: Complex64::new(1.0, 0.0), down: Complex64::new(0.0, 0.0) }
    }

    pub fn minus() -> Self {
        Self { up: Complex64::new(0.0, 0.0), down: Complex64::new(1.0, 0.0) }
    }

    /// `(|+⟩ + |−⟩)/√2`, spin along +x.
    pub fn plus_x() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self { up: Complex64::new(h, 0.0), down: Complex64::new(h, 0.0) }
    }

    /// `(|+⟩ + i|−⟩)/√2`, spin along +y.
    pub fn plus_y() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self { up: Complex64::new(h, 0.0), down: Complex64::new(0.0, h) }
    }

    /// `(⟨σ_x⟩, ⟨σ_y⟩, ⟨σ_z⟩)` of an unnormalised two-component amplitude.
    pub fn expectation_of(up: Complex64, down: Complex64) -> [f64; 3] {
        let n = up.norm_sqr() + down.norm_sqr();
        let c = up.conj() * down;
        [2.0 * c.re / n, 2.0 * c.im / n, (up.norm_sqr() - down.norm_sqr()) / n]
    }

    pub fn expectation(&self) -> [f64; 3] {
        Self::expectation_of(self.up, self.down)
    }
}

/// Angular factor `C_j e^{ijφ} e^{iqσ_zφ/2}` with `j = ν|k|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngularMode {
    pub nu: u32,
    pub k: f64,
    pub j: f64,
    pub q: f64,
    pub c_j: f64,
}

impl AngularMode {
    pub fn new(nu: u32, k: f64, q: f64) -> Result<Self, QuantumError> {
        if k == 0.0 || !k.is_finite() {
            return Err(QuantumError::Parameter(format!("k must be finite and nonzero, got {k}")));
        }
        if !q.is_finite() {
            return Err(QuantumError::Parameter("q must be finite".into()));
        }
        Ok(Self { nu, k, j: nu as f64 * k.abs(), q, c_j: (k.abs() / (2.0 * PI)).sqrt() })
    }

    /// Length of the angular interval on which the modes are orthonormal.
    pub fn period(&self) -> f64 {
        2.0 * PI / self.k.abs()
    }
}

/// `Y_{j,χ}(φ)` as `(up, down)` amplitudes.
pub fn angular_wavefunction(mode: &AngularMode, chi: &Spinor, phi: f64) -> [Complex64; 2] {
    let orbital = Complex64::from_polar(mode.c_j, mode.j * phi);
    let half = 0.5 * mode.q * phi;
    [orbital * Complex64::from_polar(1.0, half) * chi.up, orbital * Complex64::from_polar(1.0, -half) * chi.down]
}

/// Radial factor `R_j(r) = N_j J_ν(1/(|k| (r/ℓ)^k)) / ℓ`.
///
/// `ℓ = strength^{1/(2k)}` absorbs the potential strength; with unit
/// strength the Bessel argument is exactly `1/(|k| r^k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialMode {
    pub nu: u32,
    pub k: f64,
    pub norm: f64,
    pub length_scale: f64,
}

/// `true` when `∫ R² r dr` over `(0, ∞)` converges.
pub fn is_normalizable(k: f64, nu: u32) -> bool {
    if k > 0.0 {
        nu as f64 > 1.0 / k
    } else {
        k < -2.0
    }
}

impl RadialMode {
    pub fn new(k: f64, nu: u32, strength: f64) -> Result<Self, QuantumError> {
        if k == 0.0 || !k.is_finite() {
            return Err(QuantumError::Parameter(format!("k must be finite and nonzero, got {k}")));
        }
        if !(strength > 0.0) || !strength.is_finite() {
            return Err(QuantumError::Parameter(format!("strength must be positive, got {strength}")));
        }
        if !is_normalizable(k, nu) {
            return Err(QuantumError::NotNormalizable { k, nu });
        }
        let norm = Self::closed_form_norm(k, nu)?;
        Ok(Self { nu, k, norm, length_scale: strength.powf(1.0 / (2.0 * k)) })
    }

    /// Mode of any order `ν ≥ 0` for `k > 0`, normalised on `(0, r_max]`
    /// by quadrature. Orders with `ν ≤ 1/k` are not normalizable on the
    /// half-line and need this truncation.
    pub fn truncated(k: f64, nu: u32, strength: f64, r_max: f64) -> Result<Self, QuantumError> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(QuantumError::Parameter(format!("truncated modes need k > 0, got {k}")));
        }
        if !(strength > 0.0) || !strength.is_finite() {
            return Err(QuantumError::Parameter(format!("strength must be positive, got {strength}")));
        }
        let unit = Self { nu, k, norm: 1.0, length_scale: strength.powf(1.0 / (2.0 * k)) };
        let integral = radial_moment_within(&unit, 0.0, Some(r_max))?;
        Ok(Self { norm: integral.sqrt().recip(), ..unit })
    }

    /// `|N_j|² = 2√π |k|^{2/k+1} Γ(1/k+1) Γ(1/k+ν+1) / (Γ(1/k+1/2) Γ(ν−1/k))`, as `N_j > 0`.
    fn closed_form_norm(k: f64, nu: u32) -> Result<f64, QuantumError> {
        let inv = 1.0 / k;
        let nu = nu as f64;
        let ln_sq = 0.5 * PI.ln()
            + 2f64.ln()
            + (2.0 * inv + 1.0) * k.abs().ln()
            + ln_gamma(inv + 1.0)?
            + ln_gamma(inv + nu + 1.0)?
            - ln_gamma(inv + 0.5)?
            - ln_gamma(nu - inv)?;
        Ok((0.5 * ln_sq).exp())
    }

    pub fn bessel_argument(&self, r: f64) -> f64 {
        1.0 / (self.k.abs() * (r / self.length_scale).powf(self.k))
    }

    /// Inverse of [`bessel_argument`](Self::bessel_argument).
    pub fn radius_at(&self, x: f64) -> f64 {
        self.length_scale * (self.k.abs() * x).powf(-1.0 / self.k)
    }

    /// Rough location of the peak of `R²`, where the Bessel argument is
    /// near the order.
    pub fn peak_hint(&self) -> f64 {
        self.radius_at((self.nu as f64).max(1.0))
    }
}

pub fn radial_wavefunction(mode: &RadialMode, r: f64) -> Result<f64, QuantumError> {
    if !(r > 0.0) {
        return Err(QuantumError::Grid(format!("radius must be positive, got {r}")));
    }
    let x = mode.bessel_argument(r);
    Ok(mode.norm * bessel_j(mode.nu, x)? / mode.length_scale)
}

/// Where the radial quadrature hands over to the large-argument expansion.
fn tail_start(nu: u32) -> f64 {
    (4.0 * (nu as f64).powi(2)).max(400.0)
}

/// `∫_X^∞ x^{−a} sin 2x dx` and `∫_X^∞ x^{−a} cos 2x dx` by repeated
/// integration by parts.
fn oscillatory_tail(a: f64, x: f64) -> (f64, f64) {
    fn s(a: f64, x: f64, depth: u32) -> f64 {
        let lead = (2.0 * x).cos() * x.powf(-a) / 2.0;
        if depth == 0 {
            lead
        } else {
            lead - 0.5 * a * c(a + 1.0, x, depth - 1)
        }
    }
    fn c(b: f64, x: f64, depth: u32) -> f64 {
        let lead = -(2.0 * x).sin() * x.powf(-b) / 2.0;
        if depth == 0 {
            lead
        } else {
            lead + 0.5 * b * s(b + 1.0, x, depth - 1)
        }
    }
    (s(a, x, 5), c(a, x, 5))
}

/// `∫_X^∞ J_ν(x)² x^{−λ} dx` from the large-argument form
/// `J² = (1/πx)[P² + Q² + (P² − Q²) cos 2χ − 2PQ sin 2χ]`, keeping
/// `P ≈ 1`, `Q ≈ (μ−1)/(8x)` in the oscillating part and
/// `P² + Q² ≈ 1 + (μ−1)/(8x²)` in the smooth part.
fn bessel_square_tail(nu: u32, lambda: f64, x: f64) -> f64 {
    let mu = 4.0 * (nu as f64).powi(2);
    let smooth = x.powf(-lambda) / lambda + (mu - 1.0) / 8.0 * x.powf(-lambda - 2.0) / (lambda + 2.0);
    let sign = if nu.is_multiple_of(2) { 1.0 } else { -1.0 };
    let (sin_part, _) = oscillatory_tail(lambda + 1.0, x);
    let (_, cos_part) = oscillatory_tail(lambda + 2.0, x);
    (smooth + sign * (sin_part + (mu - 1.0) / 4.0 * cos_part)) / PI
}

/// Radial moment `∫₀^∞ R² r^{1+m} dr` by adaptive quadrature in `r` where
/// the Bessel argument is below a cut-off, and the large-argument expansion
/// of `J_ν²` beyond it. `m = 0` is the normalisation integral.
pub fn radial_moment(mode: &RadialMode, m: f64) -> Result<f64, QuantumError> {
    radial_moment_within(mode, m, None)
}

/// [`radial_moment`] over `(0, r_max]`; only `k > 0` may be truncated.
pub fn radial_moment_within(mode: &RadialMode, m: f64, r_max: Option<f64>) -> Result<f64, QuantumError> {
    let k = mode.k;
    let lambda = (2.0 + m) / k + 1.0;
    if !(lambda > 0.0) {
        return Err(QuantumError::Parameter(format!("radial moment m = {m} diverges for k = {k}")));
    }
    if let Some(r) = r_max {
        if k < 0.0 || !(r > 0.0) || !r.is_finite() {
            return Err(QuantumError::Parameter(format!("truncation at r = {r} needs k > 0 and a finite radius")));
        }
    }
    let x_cut = tail_start(mode.nu);
    let r_cut = mode.radius_at(x_cut);
    let opts = QuadratureOptions { abs_tol: 1e-14, rel_tol: 1e-11, max_evaluations: 4_000_000 };
    let f = |r: f64| {
        if r <= 0.0 {
            return 0.0;
        }
        let psi = mode.norm * bessel_j(mode.nu, mode.bessel_argument(r)).unwrap_or(f64::NAN) / mode.length_scale;
        psi * psi * r.powf(1.0 + m)
    };
    let ell = mode.length_scale;
    let prefactor = mode.norm * mode.norm / (ell * ell) * ell.powf(2.0 + m) / k.abs() * k.abs().powf(-(2.0 + m) / k);
    if let Some(r) = r_max.filter(|&r| r <= r_cut) {
        return Ok(prefactor * bessel_square_tail(mode.nu, lambda, mode.bessel_argument(r)));
    }
    let bulk = if k > 0.0 {
        // split at the peak so the oscillating inner part gets its own panels
        let peak = mode.peak_hint().max(r_cut);
        match r_max {
            Some(r) if r <= peak => integrate(f, r_cut, r, &opts)?.value,
            // one panel per factor of two; a single panel over many decades misses the peak
            Some(r) => {
                let mut sum = integrate(f, r_cut, peak, &opts)?.value;
                let mut a = peak;
                while a < r {
                    let b = (2.0 * a).min(r);
                    sum += integrate(f, a, b, &opts)?.value;
                    a = b;
                }
                sum
            }
            None => integrate(f, r_cut, peak, &opts)?.value + integrate(f, peak, f64::INFINITY, &opts)?.value,
        }
    } else {
        let peak = mode.peak_hint().min(r_cut);
        integrate(f, 0.0, peak, &opts)?.value + integrate(f, peak, r_cut, &opts)?.value
    };
    Ok(bulk + prefactor * bessel_square_tail(mode.nu, lambda, x_cut))
}

/// Independent check of the closed-form normalisation: `∫ R² r dr`.
pub fn radial_norm_quadrature(mode: &RadialMode) -> Result<f64, QuantumError> {
    radial_moment(mode, 0.0)
}

/// One level `Λ = ν|k| + sign·q/2` of the canonical angular momentum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CamLevel {
    pub nu: u32,
    pub sign: i8,
    pub lambda: f64,
}

/// CAM doublets for each `ν` in the range, `+` before `−`.
pub fn cam_spectrum(spec: &PotentialSpec, nus: RangeInclusive<u32>) -> Result<Vec<CamLevel>, QuantumError> {
    let k = spec.k();
    let mut out = Vec::new();
    for nu in nus {
        if nu == 0 || !is_normalizable(k, nu) {
            return Err(QuantumError::NotNormalizable { k, nu });
        }
        let j = nu as f64 * k.abs();
        for sign in [1i8, -1] {
            out.push(CamLevel { nu, sign, lambda: j + sign as f64 * 0.5 * spec.q });
        }
    }
    Ok(out)
}
