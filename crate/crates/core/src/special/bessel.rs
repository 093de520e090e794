//! Bessel functions of the first kind, non-negative integer order, real
//! non-negative argument.
//!
//! Three regimes:
//! - ascending power series when `x²/4 < ν + 1` or `x <= 2` (terms decrease
//!   from the first one, so there is no cancellation to speak of);
//! - Miller backward recurrence normalized with `J₀ + 2ΣJ₂ₘ = 1` for
//!   intermediate arguments;
//! - Hankel asymptotic expansion when `x > 50` and `x > ν²`, where the
//!   expansion terms shrink at least as fast as `1/(2m)`.
//!
//! The radial wavefunctions evaluate `J_ν(1/(|k| r^k))` down to very small
//! `r`, so arguments of 1e12 and beyond are routine.

use std::f64::consts::PI;

use super::SpecialError;

/// Above this argument the asymptotic expansion is used (when `x > ν²`).
pub const ASYMPTOTIC_THRESHOLD: f64 = 50.0;

const MILLER_RESCALE: f64 = 1e250;

fn check_arg(x: f64) -> Result<(), SpecialError> {
    if !x.is_finite() || x < 0.0 {
        return Err(SpecialError::Domain { what: "bessel_j", value: x });
    }
    Ok(())
}

fn use_series(order: u32, x: f64) -> bool {
    x <= 2.0 || 0.25 * x * x < order as f64 + 1.0
}

fn use_asymptotic(order: u32, x: f64) -> bool {
    let nu = order as f64;
    x > ASYMPTOTIC_THRESHOLD && x > nu * nu
}

/// `J_ν(x)`.
pub fn bessel_j(order: u32, x: f64) -> Result<f64, SpecialError> {
    check_arg(x)?;
    if x == 0.0 {
        return Ok(if order == 0 { 1.0 } else { 0.0 });
    }
    if use_series(order, x) {
        Ok(series(order, x))
    } else if use_asymptotic(order, x) {
        Ok(hankel_asymptotic(order, x))
    } else {
        let seq = miller(order, x);
        Ok(seq[order as usize])
    }
}

/// `[J_0(x), J_1(x), …, J_max(x)]` in one pass.
///
/// Shares the recurrence between orders, which is what the superposition
/// evaluators need.
pub fn bessel_j_orders(max_order: u32, x: f64) -> Result<Vec<f64>, SpecialError> {
    check_arg(x)?;
    let len = max_order as usize + 1;
    if x == 0.0 {
        let mut v = vec![0.0; len];
        v[0] = 1.0;
        return Ok(v);
    }
    if x <= 2.0 {
        return Ok((0..=max_order).map(|n| series(n, x)).collect());
    }
    if use_asymptotic(max_order, x) {
        // ν ≤ √x ≪ x: forward recurrence is stable
        let mut v = Vec::with_capacity(len);
        v.push(hankel_asymptotic(0, x));
        if max_order >= 1 {
            v.push(hankel_asymptotic(1, x));
        }
        for n in 1..max_order as usize {
            let next = 2.0 * n as f64 / x * v[n] - v[n - 1];
            v.push(next);
        }
        return Ok(v);
    }
    let mut v = miller(max_order, x);
    v.truncate(len);
    Ok(v)
}

/// Ascending series Σ (−1)^m (x/2)^{ν+2m} / (m! (ν+m)!).
fn series(order: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    // leading term (x/2)^ν / ν!, built up multiplicatively to avoid overflow
    let mut term = 1.0;
    for i in 1..=order {
        term *= half / i as f64;
        if term == 0.0 {
            return 0.0;
        }
    }
    let q = -half * half;
    let mut sum = term;
    let nu = order as f64;
    let mut m = 1.0;
    loop {
        term *= q / (m * (nu + m));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
        m += 1.0;
        if m > 500.0 {
            break;
        }
    }
    sum
}

fn miller_start(order: u32, x: f64) -> usize {
    let top = (order as f64).max(x);
    let m = top + 20.0 + (60.0 * top).sqrt();
    let m = m.ceil() as usize;
    m + (m & 1)
}

/// Backward recurrence from a high even order; returns J_0..=J_order at least.
fn miller(order: u32, x: f64) -> Vec<f64> {
    let start = miller_start(order, x);
    let keep = order as usize;
    let mut out = vec![0.0; keep.max(1) + 1];
    let mut j_next = 0.0; // J_{n+1}
    let mut j_cur = 1e-300; // J_n, arbitrary seed
    let mut norm = 0.0;
    let two_over_x = 2.0 / x;
    let mut n = start;
    loop {
        if n <= keep {
            out[n] = j_cur;
        }
        if n.is_multiple_of(2) {
            norm += if n == 0 { j_cur } else { 2.0 * j_cur };
        }
        if n == 0 {
            break;
        }
        let j_prev = n as f64 * two_over_x * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        n -= 1;
        if j_cur.abs() > MILLER_RESCALE {
            j_cur /= MILLER_RESCALE;
            j_next /= MILLER_RESCALE;
            norm /= MILLER_RESCALE;
            for v in out.iter_mut() {
                *v /= MILLER_RESCALE;
            }
        }
    }
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}

/// Hankel expansion J_ν(x) ≈ √(2/πx) [P cos ω − Q sin ω], ω = x − νπ/2 − π/4.
fn hankel_asymptotic(order: u32, x: f64) -> f64 {
    let mu = 4.0 * (order as f64).powi(2);
    let eight_x = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60u32 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * eight_x);
        let mag = term.abs();
        if mag > last {
            break;
        }
        last = mag;
        // terms alternate between Q (odd k) and P (even k) with signs + - - + + - - ...
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if mag < 1e-17 {
            break;
        }
    }
    let omega = reduced_phase(order, x);
    (2.0 / (PI * x)).sqrt() * (p * omega.cos() - q * omega.sin())
}

/// `x − νπ/2 − π/4` reduced modulo 2π with the large part of `x` removed
/// first, which keeps the phase accurate for huge arguments.
fn reduced_phase(order: u32, x: f64) -> f64 {
    // 2π = TWO_PI_HI + TWO_PI_LO to ~1e-32
    const TWO_PI_HI: f64 = std::f64::consts::TAU;
    const TWO_PI_LO: f64 = 2.449_293_598_294_706_4e-16;
    let n = (x / TWO_PI_HI).round();
    let xr = (-n).mul_add(TWO_PI_HI, x);
    let xr = (-n).mul_add(TWO_PI_LO, xr);
    let shift = ((order % 4) as f64) * 0.5 * PI + 0.25 * PI;
    (xr - shift).rem_euclid(TWO_PI_HI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Independent oracle: the power series evaluated with compensated
    /// summation. Only used where the series terms stay moderate.
    fn series_oracle(order: u32, x: f64) -> f64 {
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for m in 0..200u32 {
            let mut t = if m % 2 == 0 { 1.0 } else { -1.0 };
            for i in 1..=m {
                t *= 0.5 * x / i as f64;
            }
            for i in 1..=(order + m) {
                t *= 0.5 * x / i as f64;
            }
            let y = t - comp;
            let s = sum + y;
            comp = (s - sum) - y;
            sum = s;
        }
        sum
    }

    #[test]
    fn exact_at_origin() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(1, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j(7, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn j1_at_one_matches_series() {
        let v = bessel_j(1, 1.0).unwrap();
        assert_relative_eq!(v, 0.440_050_585_744_933_5, max_relative = 1e-14);
        assert_relative_eq!(v, series_oracle(1, 1.0), max_relative = 1e-14);
    }

    #[test]
    fn j5_at_ten_miller_vs_series() {
        let v = bessel_j(5, 10.0).unwrap();
        assert_relative_eq!(v, series_oracle(5, 10.0), max_relative = 1e-11);
        assert_relative_eq!(v, -0.234_061_528_186_793_64, max_relative = 1e-12);
    }

    // 40-digit mpmath references, truncated
    #[test]
    #[allow(clippy::excessive_precision)]
    fn against_high_precision_reference() {
        let cases: [(u32, f64, f64); 15] = [
            (0, 0.5, 0.938_469_807_240_812_904_23),
            (2, 7.3, -0.265_594_911_883_436_910_53),
            (30, 25.0, 0.011_809_026_124_269_016_2),
            (30, 45.0, 0.045_799_309_554_040_956_079),
            (0, 60.0, -0.091_471_804_089_061_869_531),
            (3, 120.0, 0.009_404_539_121_233_908_035_6),
            (10, 1e4, 0.007_114_312_383_354_274_503_2),
            (1, 1e8, 7.306_391_181_551_854_859_3e-5),
            (20, 35.0, -0.109_274_173_971_780_365_24),
            (30, 900.0, -0.009_166_923_460_902_050_613_9),
            (30, 1500.0, 0.011_564_795_680_959_963_745),
            (7, 3.0, 0.002_547_294_451_804_693_759_1),
            (15, 49.0, -0.030_071_191_082_184_355_689),
            (4, 1e12, 1.016_712_505_067_378_591_7e-7),
            (1, 1.0, 0.440_050_585_744_933_515_96),
        ];
        for (n, x, want) in cases {
            let tol = if x <= 50.0 { 1e-10 } else { 1e-8 };
            let got = bessel_j(n, x).unwrap();
            assert_relative_eq!(got, want, max_relative = tol);
            let seq = bessel_j_orders(n, x).unwrap();
            assert_relative_eq!(seq[n as usize], want, max_relative = tol);
        }
    }

    #[test]
    fn near_zero_of_j0_is_small() {
        let v = bessel_j(0, 2.404_825_557_695_773).unwrap();
        assert!(v.abs() < 1e-15, "{v}");
    }

    #[test]
    fn orders_agree_with_scalar() {
        for &x in &[0.3, 1.9, 2.5, 11.0, 33.3, 49.9, 75.0, 400.0, 2e3, 1e6] {
            let seq = bessel_j_orders(30, x).unwrap();
            for n in 0..=30u32 {
                let s = bessel_j(n, x).unwrap();
                let diff = (seq[n as usize] - s).abs();
                assert!(diff <= 1e-12 * (1.0f64).max(s.abs()), "n={n} x={x} {diff}");
            }
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(bessel_j(0, f64::NAN).is_err());
        assert!(bessel_j(1, f64::INFINITY).is_err());
        assert!(bessel_j(1, -1.0).is_err());
    }
}
