//! Gamma function for real arguments.
//!
//! Lanczos approximation (g = 7, nine coefficients) for `x >= 0.5`, the
//! reflection formula below that. Relative accuracy is a few ulps times
//! `|ln Γ(x)|`, comfortably inside 1e-12 on `[0.1, 50]`.

#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;

use super::SpecialError;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Arguments within this distance of a non-positive integer are poles.
pub const POLE_TOLERANCE: f64 = 1e-12;

fn lanczos_sum(x: f64) -> f64 {
    // x is the shifted argument (Γ(x + 1) form)
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    acc
}

/// `sin(πx)` with exact zeros at integers.
fn sin_pi(x: f64) -> f64 {
    let r = x.rem_euclid(2.0);
    let (r, sign) = if r > 1.0 { (r - 1.0, -1.0) } else { (r, 1.0) };
    let v = if r <= 0.25 {
        (PI * r).sin()
    } else if r <= 0.75 {
        (PI * (0.5 - r)).cos()
    } else {
        (PI * (1.0 - r)).sin()
    };
    sign * v
}

fn is_pole(x: f64) -> bool {
    x <= POLE_TOLERANCE && (x - x.round()).abs() <= POLE_TOLERANCE
}

/// Γ(x) for real `x`.
///
/// Fails with [`SpecialError::Pole`] when `x` is a non-positive integer (to
/// within [`POLE_TOLERANCE`]) and with [`SpecialError::Domain`] for NaN/inf.
pub fn gamma_fn(x: f64) -> Result<f64, SpecialError> {
    if !x.is_finite() {
        return Err(SpecialError::Domain { what: "gamma", value: x });
    }
    if is_pole(x) {
        return Err(SpecialError::Pole { value: x });
    }
    if x < 0.5 {
        // Γ(x) Γ(1 - x) = π / sin(πx)
        let g = gamma_fn(1.0 - x)?;
        return Ok(PI / (sin_pi(x) * g));
    }
    if x == x.floor() && x <= 171.0 {
        let mut f = 1.0;
        let mut i = 2.0;
        while i < x {
            f *= i;
            i += 1.0;
        }
        return Ok(f);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    let log_part = (z + 0.5) * t.ln() - t;
    Ok((2.0 * PI).sqrt() * log_part.exp() * lanczos_sum(z))
}

/// ln Γ(x) for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64, SpecialError> {
    if !x.is_finite() || x <= 0.0 {
        return Err(SpecialError::Domain { what: "ln_gamma", value: x });
    }
    if x < 0.5 {
        // ln Γ(x) = ln π - ln sin(πx) - ln Γ(1 - x), sin(πx) > 0 on (0, 1)
        return Ok(PI.ln() - sin_pi(x).ln() - ln_gamma(1.0 - x)?);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln())
}

/// ln of the binomial coefficient `C(n, m)`.
pub fn ln_binomial(n: u32, m: u32) -> f64 {
    assert!(m <= n, "binomial with m > n");
    let f = |v: u32| ln_gamma(v as f64 + 1.0).expect("positive argument");
    f(n) - f(m) - f(n - m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn known_values() {
        assert_relative_eq!(gamma_fn(0.5).unwrap(), PI.sqrt(), max_relative = 1e-14);
        assert_eq!(gamma_fn(1.0).unwrap(), 1.0);
        assert_eq!(gamma_fn(4.0).unwrap(), 6.0);
    }

    // Reference values from 40-digit mpmath.
    #[test]
    fn against_high_precision_reference() {
        let cases = [
            (0.1, 9.513_507_698_668_731_285_8),
            (3.7, 4.170_651_783_796_604_030_1),
            (50.0, 6.082_818_640_342_675_608_7e62),
            (1.0 / 3.0, 2.678_938_534_707_747_788_9),
            (5.0 / 6.0, 1.128_787_029_908_125_924_1),
            (10.25, 639_232.598_779_576_794_28),
            (0.75, 1.225_416_702_465_177_645_1),
            (-0.5, -3.544_907_701_811_032_054_6),
            (-2.5, -0.945_308_720_482_941_881_23),
            (-1.499, 2.364_945_226_442_707_720_8),
        ];
        for (x, want) in cases {
            assert_relative_eq!(gamma_fn(x).unwrap(), want, max_relative = 1e-12);
        }
    }

    #[test]
    fn poles_are_rejected() {
        for x in [0.0, -1.0, -2.0, -7.0, -3.0 + 1e-13] {
            assert!(matches!(gamma_fn(x), Err(SpecialError::Pole { .. })), "x = {x}");
        }
        assert!(gamma_fn(-3.0 + 1e-9).is_ok());
        assert!(matches!(gamma_fn(f64::NAN), Err(SpecialError::Domain { .. })));
    }

    #[test]
    fn ln_gamma_matches_gamma() {
        for x in [0.2, 0.5, 1.5, 7.25, 31.0, 45.5] {
            assert_relative_eq!(ln_gamma(x).unwrap(), gamma_fn(x).unwrap().ln(), max_relative = 1e-12, epsilon = 1e-14);
        }
    }

    #[test]
    fn binomial_in_log_space() {
        assert_relative_eq!(ln_binomial(30, 15).exp(), 155_117_520.0, max_relative = 1e-12);
        assert_relative_eq!(ln_binomial(5, 2).exp(), 10.0, max_relative = 1e-13);
        assert!(ln_binomial(4, 0).abs() < 1e-14);
    }
}
