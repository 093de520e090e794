use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// 2×2 complex matrix. Gauge potentials and field strengths are Hermitian
/// and traceless; gauge transformations are unitary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

/// A 2×2 Hermitian matrix value of a gauge potential or field component.
pub type GaugeMatrix = Mat2;

impl Mat2 {
    pub const ZERO: Mat2 = Mat2([[ZERO, ZERO], [ZERO, ZERO]]);
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);
    pub const SIGMA_X: Mat2 = Mat2([[ZERO, ONE], [ONE, ZERO]]);
    pub const SIGMA_Y: Mat2 = Mat2([[ZERO, Complex64::new(0.0, -1.0)], [I, ZERO]]);
    pub const SIGMA_Z: Mat2 = Mat2([[ONE, ZERO], [ZERO, Complex64::new(-1.0, 0.0)]]);

    /// `c₀ 1 + c·σ` with real coefficients.
    pub fn pauli(c0: f64, c: [f64; 3]) -> Mat2 {
        Mat2([
            [Complex64::new(c0 + c[2], 0.0), Complex64::new(c[0], -c[1])],
            [Complex64::new(c[0], c[1]), Complex64::new(c0 - c[2], 0.0)],
        ])
    }

    /// Real Pauli coefficients `(c₀, c_x, c_y, c_z)` of a Hermitian matrix.
    pub fn pauli_coefficients(&self) -> (f64, [f64; 3]) {
        let m = &self.0;
        let c0 = 0.5 * (m[0][0].re + m[1][1].re);
        let cz = 0.5 * (m[0][0].re - m[1][1].re);
        let cx = 0.5 * (m[0][1].re + m[1][0].re);
        let cy = 0.5 * (m[1][0].im - m[0][1].im);
        (c0, [cx, cy, cz])
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        self.scale_c(Complex64::new(s, 0.0))
    }

    pub fn scale_c(&self, s: Complex64) -> Mat2 {
        let m = &self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn adjoint(&self) -> Mat2 {
        let m = &self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn commutator(&self, other: &Mat2) -> Mat2 {
        *self * *other - *other * *self
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let d = *self - *other;
        d.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs_diff(&Mat2::ZERO)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (*self * self.adjoint()).max_abs_diff(&Mat2::IDENTITY) <= tol
    }

    /// `exp(i a·σ) = cos|a| + i sin|a| (â·σ)`.
    pub fn exp_i_pauli(a: [f64; 3]) -> Mat2 {
        let n = norm3(a);
        let c = n.cos();
        let s = sinc(n);
        Mat2::IDENTITY.scale(c) + Mat2::pauli(0.0, [a[0] * s, a[1] * s, a[2] * s]).scale_c(I)
    }

    /// Directional derivative of `exp(i a·σ)` along `da`.
    pub fn exp_i_pauli_derivative(a: [f64; 3], da: [f64; 3]) -> Mat2 {
        let n = norm3(a);
        let a_da = a[0] * da[0] + a[1] * da[1] + a[2] * da[2];
        let s = sinc(n);
        let ds = sinc_slope_over_x(n);
        let scalar = Mat2::IDENTITY.scale(-s * a_da);
        let vec = [s * da[0] + ds * a_da * a[0], s * da[1] + ds * a_da * a[1], s * da[2] + ds * a_da * a[2]];
        scalar + Mat2::pauli(0.0, vec).scale_c(I)
    }

    /// Row-major `[[re]]` and `[[im]]` arrays for export.
    pub fn parts(&self) -> ([[f64; 2]; 2], [[f64; 2]; 2]) {
        let m = &self.0;
        ([[m[0][0].re, m[0][1].re], [m[1][0].re, m[1][1].re]], [[m[0][0].im, m[0][1].im], [m[1][0].im, m[1][1].im]])
    }
}

fn norm3(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

/// `sin x / x`.
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// `(d/dx sinc x) / x = (x cos x − sin x) / x³`.
fn sinc_slope_over_x(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        let x2 = x * x;
        -1.0 / 3.0 + x2 / 30.0 - x2 * x2 / 840.0
    } else {
        (x * x.cos() - x.sin()) / (x * x * x)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + (-o)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(-1.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        let e = |i: usize, j: usize| a[i][0] * b[0][j] + a[i][1] * b[1][j];
        Mat2([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }
}

/// Serialised form: real and imaginary parts as 2×2 arrays.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatrixParts {
    pub re: [[f64; 2]; 2],
    pub im: [[f64; 2]; 2],
}

impl From<&Mat2> for MatrixParts {
    fn from(m: &Mat2) -> Self {
        let (re, im) = m.parts();
        Self { re, im }
    }
}
