//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Intervals are bisected in order of largest error estimate until the
//! summed estimate falls below `max(abs_tol, rel_tol·|I|)` or the evaluation
//! budget runs out. Semi-infinite ranges `[a, ∞)` are mapped onto `[0, 1)`
//! with `x = a + t/(1 − t)`, `dx = dt/(1 − t)²`; the Kronrod nodes never
//! touch `t = 1`.
//!
//! The interval heap is keyed on `(error, insertion index)` so the
//! bisection order, and therefore the result, is bit-for-bit repeatable.

#![allow(clippy::excessive_precision)] // node tables are quoted to full published precision

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::SpecialError;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Outcome of a successful integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// Absolute error estimate, always ≥ 0.
    pub error_estimate: f64,
    /// Number of integrand evaluations, always ≥ 1.
    pub evaluations: usize,
}

/// Upper integration limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Upper {
    Finite(f64),
    Infinity,
}

impl From<f64> for Upper {
    fn from(b: f64) -> Self {
        if b == f64::INFINITY {
            Upper::Infinity
        } else {
            Upper::Finite(b)
        }
    }
}

/// Tolerances and evaluation budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evaluations: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 1e-10, max_evaluations: 2_000_000 }
    }
}

impl QuadratureOptions {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self { abs_tol, rel_tol, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    id: u64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then_with(|| other.id.cmp(&self.id))
    }
}

/// One 15-point Kronrod panel: (integral, error estimate).
fn kronrod_panel<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64), SpecialError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    if !fc.is_finite() {
        return Err(SpecialError::NonFiniteIntegrand { at: center });
    }
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        if !f1.is_finite() || !f2.is_finite() {
            return Err(SpecialError::NonFiniteIntegrand { at: center - dx });
        }
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    Ok((value, err))
}

fn adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    opts: &QuadratureOptions,
) -> Result<QuadratureResult, SpecialError> {
    let mut evaluations = 0usize;
    let mut next_id = 0u64;
    let mut heap = BinaryHeap::new();
    let (v, e) = kronrod_panel(&mut f, a, b)?;
    evaluations += 15;
    heap.push(Segment { a, b, value: v, error: e, id: next_id });
    next_id += 1;
    let mut total = v;
    let mut total_err = e;
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * total.abs());
        if total_err <= target {
            break;
        }
        if evaluations + 30 > opts.max_evaluations {
            return Err(SpecialError::NoConvergence { estimate: total, error_estimate: total_err, evaluations });
        }
        let worst = heap.pop().expect("heap never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval can no longer be split in floating point
            return Err(SpecialError::NoConvergence { estimate: total, error_estimate: total_err, evaluations });
        }
        let (v1, e1) = kronrod_panel(&mut f, worst.a, mid)?;
        let (v2, e2) = kronrod_panel(&mut f, mid, worst.b)?;
        evaluations += 30;
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1, id: next_id });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2, id: next_id + 1 });
        next_id += 2;
        total += (v1 + v2) - worst.value;
        total_err += (e1 + e2) - worst.error;
    }
    // final sum in left-to-right order, free of running-update drift
    let mut segs = heap.into_vec();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = segs.iter().map(|s| s.value).sum();
    let error_estimate = segs.iter().map(|s| s.error).sum::<f64>().max(0.0);
    Ok(QuadratureResult { value, error_estimate, evaluations })
}

/// ∫ₐᵇ f(x) dx with `b` finite or `+∞`.
pub fn integrate<F, U>(f: F, a: f64, b: U, opts: &QuadratureOptions) -> Result<QuadratureResult, SpecialError>
where
    F: Fn(f64) -> f64,
    U: Into<Upper>,
{
    if !(opts.abs_tol > 0.0 && opts.rel_tol > 0.0) {
        return Err(SpecialError::InvalidTolerance);
    }
    if !a.is_finite() {
        return Err(SpecialError::Domain { what: "integrate lower limit", value: a });
    }
    match b.into() {
        Upper::Finite(b) => {
            if !b.is_finite() {
                return Err(SpecialError::Domain { what: "integrate upper limit", value: b });
            }
            if a == b {
                return Ok(QuadratureResult { value: 0.0, error_estimate: 0.0, evaluations: 1 });
            }
            adaptive(&f, a, b, opts)
        }
        Upper::Infinity => {
            let mapped = |t: f64| {
                let one_minus = 1.0 - t;
                let x = a + t / one_minus;
                f(x) / (one_minus * one_minus)
            };
            adaptive(mapped, 0.0, 1.0, opts)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn polynomial() {
        let r = integrate(|x| x, 0.0, 1.0, &QuadratureOptions::default()).unwrap();
        assert_abs_diff_eq!(r.value, 0.5, epsilon = 1e-15);
        assert!(r.evaluations >= 1 && r.error_estimate >= 0.0);
    }

    #[test]
    fn exponential_tail() {
        let r = integrate(|x: f64| (-x).exp(), 0.0, f64::INFINITY, &QuadratureOptions::default()).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn algebraic_endpoint() {
        // ∫₀¹ √x dx = 2/3
        let r = integrate(|x: f64| x.sqrt(), 0.0, 1.0, &QuadratureOptions::default()).unwrap();
        assert_abs_diff_eq!(r.value, 2.0 / 3.0, epsilon = 1e-11);
        // ∫₁^∞ x⁻³ dx = 1/2
        let r = integrate(|x: f64| x.powi(-3), 1.0, f64::INFINITY, &QuadratureOptions::default()).unwrap();
        assert_abs_diff_eq!(r.value, 0.5, epsilon = 1e-11);
    }

    #[test]
    fn deterministic() {
        let f = |x: f64| (3.0 * x).sin() * (-x * x).exp();
        let a = integrate(f, -1.0, f64::INFINITY, &QuadratureOptions::default()).unwrap();
        let b = integrate(f, -1.0, f64::INFINITY, &QuadratureOptions::default()).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.evaluations, b.evaluations);
    }

    #[test]
    fn budget_exhaustion_reports_best_estimate() {
        let opts = QuadratureOptions { abs_tol: 1e-14, rel_tol: 1e-14, max_evaluations: 100 };
        let err = integrate(|x: f64| (1.0 / x).sin(), 1e-6, 1.0, &opts).unwrap_err();
        match err {
            SpecialError::NoConvergence { estimate, evaluations, .. } => {
                assert!(estimate.is_finite());
                assert!(evaluations <= 100);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_nonpositive_tolerance() {
        let opts = QuadratureOptions { abs_tol: 0.0, ..Default::default() };
        assert!(matches!(integrate(|x| x, 0.0, 1.0, &opts), Err(SpecialError::InvalidTolerance)));
    }
}
