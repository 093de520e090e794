use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{GaugeError, Mat2};

/// Line-charge parameter `η` and coupling `β`; the spin-orbit strength of
/// the classical and quantum modules is `q = 2βη`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldParams {
    pub eta: f64,
    pub beta: f64,
}

impl FieldParams {
    pub fn new(eta: f64, beta: f64) -> Result<Self, GaugeError> {
        if !eta.is_finite() || !beta.is_finite() {
            return Err(GaugeError::NonFinite);
        }
        Ok(Self { eta, beta })
    }

    /// Parameters reproducing a given `q` at fixed `β`.
    pub fn from_q(q: f64, beta: f64) -> Result<Self, GaugeError> {
        if beta == 0.0 {
            return Err(GaugeError::ZeroCoupling);
        }
        Self::new(q / (2.0 * beta), beta)
    }

    pub fn q(&self) -> f64 {
        2.0 * self.beta * self.eta
    }
}

/// Cartesian point; the fields are evaluated in the plane `z = 0` but the
/// finite-difference oracle also steps off it.
pub type Point = [f64; 3];

pub fn polar_point(r: f64, phi: f64) -> Point {
    let (s, c) = phi.sin_cos();
    [r * c, r * s, 0.0]
}

fn check_radius(r: f64) -> Result<(), GaugeError> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(GaugeError::Singular { r });
    }
    Ok(())
}

/// `(A_x, A_y, A_z)` at a Cartesian point; independent of `z`.
pub fn gauge_potential_at(params: &FieldParams, p: Point) -> Result<[Mat2; 3], GaugeError> {
    let r2 = p[0] * p[0] + p[1] * p[1];
    check_radius(r2.sqrt())?;
    let e = params.eta / r2;
    Ok([Mat2::SIGMA_Z.scale(-e * p[1]), Mat2::SIGMA_Z.scale(e * p[0]), Mat2::pauli(0.0, [e * p[1], e * p[0], 0.0])])
}

/// `A_x = −(η sinφ/r)σ_z`, `A_y = (η cosφ/r)σ_z`, `A_z = (η/r)(sinφ σ_x + cosφ σ_y)`.
pub fn gauge_potential(params: &FieldParams, r: f64, phi: f64) -> Result<[Mat2; 3], GaugeError> {
    check_radius(r)?;
    let (s, c) = phi.sin_cos();
    let e = params.eta / r;
    Ok([Mat2::SIGMA_Z.scale(-e * s), Mat2::SIGMA_Z.scale(e * c), Mat2::pauli(0.0, [e * s, e * c, 0.0])])
}

/// Closed-form field components `(B_x, B_y, B_z)`:
///
/// - `B_x = 0`
/// - `B_y = (η/r²){(1−βη) sin2φ σ_x + [(1−βη) cos2φ + βη] σ_y}`
/// - `B_z = (η/r²){[(1−βη) cos2φ − βη] σ_x − (1−βη) sin2φ σ_y}`
///
/// In terms of the tensor `F_ij` these are `F_xy`, `F_zx` and `F_yz`.
pub fn field_strength(params: &FieldParams, r: f64, phi: f64) -> Result<[Mat2; 3], GaugeError> {
    check_radius(r)?;
    let be = params.beta * params.eta;
    let g = 1.0 - be;
    let (s2, c2) = (2.0 * phi).sin_cos();
    let e = params.eta / (r * r);
    Ok([
        Mat2::ZERO,
        Mat2::pauli(0.0, [e * g * s2, e * (g * c2 + be), 0.0]),
        Mat2::pauli(0.0, [e * (g * c2 - be), -e * g * s2, 0.0]),
    ])
}

/// Antisymmetric tensor `F_ij = ∂_i A_j − ∂_j A_i − iβ[A_i, A_j]` of any
/// matrix potential, by central differences with step `h`.
pub fn field_tensor_numeric<A>(potential: A, beta: f64, p: Point, h: f64) -> Result<[[Mat2; 3]; 3], GaugeError>
where
    A: Fn(Point) -> Result<[Mat2; 3], GaugeError>,
{
    let a0 = potential(p)?;
    // d[i][j] = ∂_i A_j
    let mut d = [[Mat2::ZERO; 3]; 3];
    for (i, row) in d.iter_mut().enumerate() {
        let mut plus = p;
        let mut minus = p;
        plus[i] += h;
        minus[i] -= h;
        let ap = potential(plus)?;
        let am = potential(minus)?;
        for j in 0..3 {
            row[j] = (ap[j] - am[j]).scale(0.5 / h);
        }
    }
    let minus_i_beta = Complex64::new(0.0, -beta);
    let mut f = [[Mat2::ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                f[i][j] = d[i][j] - d[j][i] + a0[i].commutator(&a0[j]).scale_c(minus_i_beta);
            }
        }
    }
    Ok(f)
}

/// `(F_xy, F_zx, F_yz)`, the ordering of [`field_strength`].
pub fn tensor_to_components(f: &[[Mat2; 3]; 3]) -> [Mat2; 3] {
    [f[0][1], f[2][0], f[1][2]]
}

/// Finite-difference step beyond which the O(h²) error is no longer small.
pub const MAX_RELATIVE_STEP: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq)]
pub struct NumericField {
    pub components: [Mat2; 3],
    pub warning: Option<String>,
}

/// [`field_strength`] recomputed from [`gauge_potential`] by central
/// differences plus the explicit commutator.
pub fn field_strength_numeric(params: &FieldParams, r: f64, phi: f64, h: f64) -> Result<NumericField, GaugeError> {
    check_radius(r)?;
    if !(h > 0.0) || 2.0 * h >= r {
        return Err(GaugeError::Step { h, r });
    }
    let warning = (h > MAX_RELATIVE_STEP * r)
        .then(|| format!("step h = {h} is large relative to r = {r}; expect O(h²/r²) errors"));
    let f = field_tensor_numeric(|p| gauge_potential_at(params, p), params.beta, polar_point(r, phi), h)?;
    Ok(NumericField { components: tensor_to_components(&f), warning })
}

/// Real, smooth gauge function `f(x, y, z)` entering `U = exp(iβ f·σ)`.
pub trait GaugeFunction {
    fn value(&self, p: Point) -> [f64; 3];

    /// `∂f_a/∂x_i` as `[i][a]`; `None` selects central differences.
    fn jacobian(&self, _p: Point) -> Option<[[f64; 3]; 3]> {
        None
    }
}

impl<F: Fn(Point) -> [f64; 3]> GaugeFunction for F {
    fn value(&self, p: Point) -> [f64; 3] {
        self(p)
    }
}

/// Step used when a [`GaugeFunction`] has no analytic Jacobian.
pub fn jacobian_step(p: Point) -> f64 {
    1e-5 * (1.0 + p.iter().map(|v| v.abs()).fold(0.0, f64::max))
}

fn jacobian(f: &dyn GaugeFunction, p: Point) -> [[f64; 3]; 3] {
    if let Some(j) = f.jacobian(p) {
        return j;
    }
    let h = jacobian_step(p);
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        let mut plus = p;
        let mut minus = p;
        plus[i] += h;
        minus[i] -= h;
        let (fp, fm) = (f.value(plus), f.value(minus));
        for a in 0..3 {
            row[a] = (fp[a] - fm[a]) / (2.0 * h);
        }
    }
    out
}

/// `U = exp(iβ f·σ)` at a point.
pub fn gauge_unitary(params: &FieldParams, f: &dyn GaugeFunction, p: Point) -> Mat2 {
    let v = f.value(p);
    Mat2::exp_i_pauli([params.beta * v[0], params.beta * v[1], params.beta * v[2]])
}

/// `A'_i = U A_i U† − (i/β)(∂_i U)U†` at a Cartesian point.
pub fn gauge_transform_at(params: &FieldParams, f: &dyn GaugeFunction, p: Point) -> Result<[Mat2; 3], GaugeError> {
    if params.beta == 0.0 {
        return Err(GaugeError::ZeroCoupling);
    }
    let a = gauge_potential_at(params, p)?;
    let v = f.value(p);
    let b = params.beta;
    let arg = [b * v[0], b * v[1], b * v[2]];
    let u = Mat2::exp_i_pauli(arg);
    let ud = u.adjoint();
    let jac = jacobian(f, p);
    let inv = Complex64::new(0.0, -1.0 / b);
    let mut out = [Mat2::ZERO; 3];
    for i in 0..3 {
        let darg = [b * jac[i][0], b * jac[i][1], b * jac[i][2]];
        let du = Mat2::exp_i_pauli_derivative(arg, darg);
        out[i] = u * a[i] * ud + (du * ud).scale_c(inv);
    }
    Ok(out)
}

pub fn gauge_transform(params: &FieldParams, f: &dyn GaugeFunction, r: f64, phi: f64) -> Result<[Mat2; 3], GaugeError> {
    check_radius(r)?;
    gauge_transform_at(params, f, polar_point(r, phi))
}

/// Largest entrywise deviation between the field tensor of the transformed
/// potential and `U F U†`, both by central differences with step `h`.
pub fn covariance_defect(
    params: &FieldParams,
    f: &dyn GaugeFunction,
    r: f64,
    phi: f64,
    h: f64,
) -> Result<f64, GaugeError> {
    check_radius(r)?;
    let p = polar_point(r, phi);
    let original = field_tensor_numeric(|x| gauge_potential_at(params, x), params.beta, p, h)?;
    let transformed = field_tensor_numeric(|x| gauge_transform_at(params, f, x), params.beta, p, h)?;
    let u = gauge_unitary(params, f, p);
    let ud = u.adjoint();
    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let rotated = u * original[i][j] * ud;
            worst = worst.max(rotated.max_abs_diff(&transformed[i][j]));
        }
    }
    Ok(worst)
}

/// Sum of `c·sin(k·x + θ)` terms per component: a smooth gauge function
/// with an exact Jacobian.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigGaugeFunction {
    /// `(component, amplitude, wave vector, phase)`
    pub terms: Vec<(usize, f64, [f64; 3], f64)>,
}

impl TrigGaugeFunction {
    /// `order` random terms per component with amplitudes and wave numbers
    /// in `[-1, 1]`.
    pub fn random<R: rand::Rng>(rng: &mut R, order: usize) -> Self {
        let mut terms = Vec::new();
        for comp in 0..3 {
            for _ in 0..order {
                let amp = rng.gen_range(-1.0..1.0);
                let k = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
                let phase = rng.gen_range(0.0..std::f64::consts::TAU);
                terms.push((comp, amp, k, phase));
            }
        }
        Self { terms }
    }
}

impl GaugeFunction for TrigGaugeFunction {
    fn value(&self, p: Point) -> [f64; 3] {
        let mut out = [0.0; 3];
        for &(c, amp, k, ph) in &self.terms {
            out[c] += amp * (k[0] * p[0] + k[1] * p[1] + k[2] * p[2] + ph).sin();
        }
        out
    }

    fn jacobian(&self, p: Point) -> Option<[[f64; 3]; 3]> {
        let mut out = [[0.0; 3]; 3];
        for &(c, amp, k, ph) in &self.terms {
            let d = amp * (k[0] * p[0] + k[1] * p[1] + k[2] * p[2] + ph).cos();
            for i in 0..3 {
                out[i][c] += d * k[i];
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(eta: f64, beta: f64) -> FieldParams {
        FieldParams::new(eta, beta).unwrap()
    }

    #[test]
    fn potential_at_phi_zero() {
        let a = gauge_potential(&params(1.0, 0.05), 1.0, 0.0).unwrap();
        assert!(a[0].max_abs() < 1e-16);
        assert_eq!(a[1], Mat2::SIGMA_Z);
        assert_eq!(a[2], Mat2::SIGMA_Y);
        let half = gauge_potential(&params(1.0, 0.05), 2.0, 0.0).unwrap();
        assert_eq!(half[1], Mat2::SIGMA_Z.scale(0.5));
        for m in &a {
            assert_eq!(m.trace(), Complex64::new(0.0, 0.0));
        }
        assert!(matches!(gauge_potential(&params(1.0, 0.05), 0.0, 0.0), Err(GaugeError::Singular { .. })));
    }

    #[test]
    fn polar_and_cartesian_agree() {
        let p = params(0.7, 0.3);
        let a = gauge_potential(&p, 1.3, 2.1).unwrap();
        let b = gauge_potential_at(&p, polar_point(1.3, 2.1)).unwrap();
        for i in 0..3 {
            assert!(a[i].max_abs_diff(&b[i]) < 1e-15);
        }
    }

    #[test]
    fn field_examples() {
        let b = field_strength(&params(1.0, 0.05), 1.0, 0.0).unwrap();
        assert_eq!(b[0], Mat2::ZERO);
        assert!(b[1].max_abs_diff(&Mat2::SIGMA_Y) < 1e-15);
        assert!(b[2].max_abs_diff(&Mat2::SIGMA_X.scale(0.9)) < 1e-15);

        // βη = 1: no φ dependence left
        let p = params(2.0, 0.5);
        for phi in [0.0, 0.4, 2.0] {
            let b = field_strength(&p, 1.5, phi).unwrap();
            let e = 2.0 / 2.25;
            assert!(b[1].max_abs_diff(&Mat2::SIGMA_Y.scale(e)) < 1e-15);
            assert!(b[2].max_abs_diff(&Mat2::SIGMA_X.scale(-e)) < 1e-15);
        }
    }

    #[test]
    fn numeric_field_matches_closed_form() {
        let p = params(1.0, 0.05);
        let num = field_strength_numeric(&p, 1.0, 0.7, 1e-4).unwrap();
        let exact = field_strength(&p, 1.0, 0.7).unwrap();
        assert!(num.warning.is_none());
        for (a, b) in num.components.iter().zip(&exact) {
            assert!(a.max_abs_diff(b) < 1e-6);
        }
        let zero = field_strength_numeric(&params(0.0, 0.3), 1.0, 0.7, 1e-4).unwrap();
        assert!(zero.components.iter().all(|m| m.max_abs() == 0.0));
        assert!(field_strength_numeric(&p, 1.0, 0.7, 0.1).unwrap().warning.is_some());
        assert!(field_strength_numeric(&p, 1.0, 0.7, 0.6).is_err());
    }

    #[test]
    fn abelian_limit_is_the_curl() {
        // with β = 0 the closed form keeps only the (1−βη) → 1 terms
        let p = params(1.3, 0.0);
        let num = field_strength_numeric(&p, 0.8, 1.1, 1e-4).unwrap();
        let e = 1.3 / 0.64;
        let (s2, c2) = (2.2f64).sin_cos();
        let want_y = Mat2::pauli(0.0, [e * s2, e * c2, 0.0]);
        let want_z = Mat2::pauli(0.0, [e * c2, -e * s2, 0.0]);
        assert!(num.components[1].max_abs_diff(&want_y) < 1e-6);
        assert!(num.components[2].max_abs_diff(&want_z) < 1e-6);
    }

    #[test]
    fn transform_identity_and_constant() {
        let p = params(1.0, 0.05);
        let zero = |_: Point| [0.0; 3];
        let a = gauge_potential(&p, 1.2, 0.3).unwrap();
        let t = gauge_transform(&p, &zero, 1.2, 0.3).unwrap();
        for i in 0..3 {
            assert!(a[i].max_abs_diff(&t[i]) < 1e-15);
        }
        let c = |_: Point| [0.4, -1.0, 2.0];
        let u = Mat2::exp_i_pauli([0.02, -0.05, 0.1]);
        let t = gauge_transform(&p, &c, 1.2, 0.3).unwrap();
        for i in 0..3 {
            assert!((u * a[i] * u.adjoint()).max_abs_diff(&t[i]) < 1e-15);
            assert!(t[i].is_hermitian(1e-14));
        }
        assert!(matches!(gauge_transform(&params(1.0, 0.0), &c, 1.0, 0.0), Err(GaugeError::ZeroCoupling)));
    }

    #[test]
    fn covariance_for_azimuthal_and_random_functions() {
        let p = params(1.0, 0.05);
        let c = 3.0;
        let azimuthal = move |x: Point| [0.0, 0.0, c * x[1].atan2(x[0])];
        assert!(covariance_defect(&p, &azimuthal, 1.1, 0.4, 1e-4).unwrap() < 1e-5);
        let t = gauge_transform(&p, &azimuthal, 1.1, 0.4).unwrap();
        let (_, coeff) = t[2].pauli_coefficients();
        let (_, orig) = gauge_potential(&p, 1.1, 0.4).unwrap()[2].pauli_coefficients();
        assert!((coeff[0] - orig[0]).abs() > 1e-3);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let f = TrigGaugeFunction::random(&mut rng, 3);
            let p = params(rand::Rng::gen_range(&mut rng, 0.2..2.0), rand::Rng::gen_range(&mut rng, 0.01..1.0));
            let r = rand::Rng::gen_range(&mut rng, 0.5..3.0);
            let phi = rand::Rng::gen_range(&mut rng, 0.0..std::f64::consts::TAU);
            let defect = covariance_defect(&p, &f, r, phi, 1e-4 * r).unwrap();
            assert!(defect < 1e-5, "{defect}");
        }
    }

    #[test]
    fn q_relation() {
        let p = FieldParams::from_q(0.1, 0.05).unwrap();
        assert!((p.eta - 1.0).abs() < 1e-15);
        assert!((p.q() - 0.1).abs() < 1e-16);
    }
}
