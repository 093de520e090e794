//! Exact rational parameters.
//!
//! Power indices such as `7/3` or `-17/4` decide how many sheets an orbit
//! needs before it closes, so they are kept as reduced fractions whenever
//! the input allows it. Decimal literals (`4.5`) are converted exactly.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse `{input}` as a number: {reason}")]
pub struct ParseNumberError {
    pub input: String,
    pub reason: &'static str,
}

/// Largest denominator accepted when a decimal literal is turned into a
/// fraction.
const MAX_DECIMAL_DIGITS: u32 = 15;

fn parse_ratio(s: &str) -> Result<Ratio<i64>, ParseNumberError> {
    let err = |reason| ParseNumberError { input: s.to_string(), reason };
    let t = s.trim();
    if t.is_empty() {
        return Err(err("empty"));
    }
    if let Some((p, q)) = t.split_once('/') {
        let p = parse_ratio(p)?;
        let q = parse_ratio(q)?;
        if *q.numer() == 0 {
            return Err(err("zero denominator"));
        }
        return Ok(p / q);
    }
    if t.contains(['e', 'E']) {
        return Err(err("exponent notation is not exact; use p/s"));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err("no digits"));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err("invalid digit"));
    }
    let frac_part = frac_part.trim_end_matches('0');
    if frac_part.len() as u32 > MAX_DECIMAL_DIGITS {
        return Err(err("too many decimal digits"));
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: i64 = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| err("out of range"))? };
    let denom = 10i64.pow(frac_part.len() as u32);
    let r = Ratio::new(numer, denom);
    Ok(if neg { -r } else { r })
}

/// A real parameter that remembers its exact fractional form when known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactReal {
    value: f64,
    ratio: Option<Ratio<i64>>,
}

impl ExactReal {
    pub fn rational(numer: i64, denom: i64) -> Self {
        let r = Ratio::new(numer, denom);
        Self { value: *r.numer() as f64 / *r.denom() as f64, ratio: Some(r) }
    }

    /// A value with no known fractional form.
    pub fn inexact(value: f64) -> Self {
        Self { value, ratio: None }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// `(p, s)` with `s > 0` and `gcd(p, s) = 1`.
    pub fn fraction(&self) -> Option<(i64, i64)> {
        self.ratio.map(|r| (*r.numer(), *r.denom()))
    }

    pub fn abs(&self) -> Self {
        match self.ratio {
            Some(r) => Self { value: self.value.abs(), ratio: Some(if r < Ratio::from_integer(0) { -r } else { r }) },
            None => Self::inexact(self.value.abs()),
        }
    }

    /// File-name friendly label: `7/3` → `7over3`, `-6` → `m6`.
    pub fn slug(&self) -> String {
        let s = self.to_string();
        s.replace('-', "m").replace('/', "over").replace('.', "p")
    }
}

impl From<f64> for ExactReal {
    fn from(v: f64) -> Self {
        Self::inexact(v)
    }
}

impl FromStr for ExactReal {
    type Err = ParseNumberError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match parse_ratio(s) {
            Ok(r) => Ok(Self { value: *r.numer() as f64 / *r.denom() as f64, ratio: Some(r) }),
            Err(e) if e.reason.starts_with("exponent") || e.reason == "too many decimal digits" => {
                let v: f64 = s.trim().parse().map_err(|_| e.clone())?;
                if v.is_finite() {
                    Ok(Self::inexact(v))
                } else {
                    Err(e)
                }
            }
            Err(e) => Err(e),
        }
    }
}

impl fmt::Display for ExactReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.ratio {
            Some(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Some(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            None => write!(f, "{}", self.value),
        }
    }
}

impl Serialize for ExactReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExactReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Number(f64),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
            // JSON numbers go through their shortest decimal form, so 0.1 stays 1/10
            Repr::Number(v) => {
                let text = format!("{v}");
                Ok(text.parse().unwrap_or(Self::inexact(v)))
            }
        }
    }
}

/// Parse an angle such as `4pi`, `pi/2`, `-3pi/4`, `6.28` or `2*pi`.
pub fn parse_angle(s: &str) -> Result<f64, ParseNumberError> {
    let err = |reason| ParseNumberError { input: s.to_string(), reason };
    let t = s.trim().replace(['*', ' '], "").to_lowercase();
    if let Some(idx) = t.find("pi") {
        let coef = &t[..idx];
        let rest = &t[idx + 2..];
        let c = match coef {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c.parse::<ExactReal>().map_err(|_| err("bad coefficient"))?.value(),
        };
        let d = if rest.is_empty() {
            1.0
        } else if let Some(den) = rest.strip_prefix('/') {
            den.parse::<ExactReal>().map_err(|_| err("bad divisor"))?.value()
        } else {
            return Err(err("unexpected text after pi"));
        };
        if d == 0.0 {
            return Err(err("zero divisor"));
        }
        return Ok(c * std::f64::consts::PI / d);
    }
    t.parse::<ExactReal>().map(|v| v.value()).map_err(|_| err("not an angle"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        let k: ExactReal = "7/3".parse().unwrap();
        assert_eq!(k.fraction(), Some((7, 3)));
        assert_eq!(k.to_string(), "7/3");
        let k: ExactReal = "-17/4".parse().unwrap();
        assert_eq!(k.fraction(), Some((-17, 4)));
        let k: ExactReal = "4.5".parse().unwrap();
        assert_eq!(k.fraction(), Some((9, 2)));
        let k: ExactReal = "14/6".parse().unwrap();
        assert_eq!(k.fraction(), Some((7, 3)));
        let g: ExactReal = "135/2".parse().unwrap();
        assert_eq!(g.value(), 67.5);
        let q: ExactReal = "0.1".parse().unwrap();
        assert_eq!(q.fraction(), Some((1, 10)));
        assert_eq!(q.value(), 0.1);
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "abc", "1/0", "--3", "1.2.3"] {
            assert!(s.parse::<ExactReal>().is_err(), "{s}");
        }
    }

    #[test]
    fn exponent_notation_is_inexact() {
        let v: ExactReal = "1e-3".parse().unwrap();
        assert_eq!(v.fraction(), None);
        assert_eq!(v.value(), 1e-3);
    }

    #[test]
    fn json_round_trip() {
        let k: ExactReal = "-17/4".parse().unwrap();
        let text = serde_json::to_string(&k).unwrap();
        assert_eq!(text, "\"-17/4\"");
        let back: ExactReal = serde_json::from_str(&text).unwrap();
        assert_eq!(back, k);
        let n: ExactReal = serde_json::from_str("0.25").unwrap();
        assert_eq!(n.fraction(), Some((1, 4)));
    }

    #[test]
    fn angles() {
        use std::f64::consts::PI;
        assert_eq!(parse_angle("4pi").unwrap(), 4.0 * PI);
        assert_eq!(parse_angle("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_angle("-3pi/4").unwrap(), -3.0 * PI / 4.0);
        assert_eq!(parse_angle("2*pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_angle("1.5").unwrap(), 1.5);
        assert!(parse_angle("pix").is_err());
    }

    #[test]
    fn slugs() {
        assert_eq!("17/3".parse::<ExactReal>().unwrap().slug(), "17over3");
        assert_eq!("-6".parse::<ExactReal>().unwrap().slug(), "m6");
    }
}
