use std::f64::consts::TAU;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use super::QccError;
use crate::quantum::WaveField;

/// Mismatch below which a rotation counts as a symmetry.
pub const SYMMETRY_TOL: f64 = 1e-9;
/// Mismatches closer than this are indistinguishable.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryScan {
    /// `2π / Δ` for the selected rotation angle `Δ`.
    pub order: f64,
    /// `order` as `(numerator, denominator)`.
    pub fraction: (u64, u64),
    /// `‖ρ(φ+Δ) − ρ(φ)‖² / ‖ρ‖²`
    pub mismatch: f64,
    /// Other orders whose mismatch ties with the selected one.
    pub ties: Vec<(u64, u64)>,
    /// Every scanned rotation leaves the density unchanged.
    pub degenerate: bool,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Power spectrum `|ρ̂_m|²` summed over rings, indexed by `m` in
/// `0..n_phi` (negative frequencies in the upper half).
fn ring_power(field: &WaveField) -> Vec<f64> {
    let n = field.phi.len();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let mut power = vec![0.0; n];
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..field.r.len() {
        for (m, slot) in buf.iter_mut().enumerate() {
            *slot = Complex64::new(field.density_at(i, m), 0.0);
        }
        fft.process(&mut buf);
        for (p, c) in power.iter_mut().zip(&buf) {
            *p += c.norm_sqr();
        }
    }
    power
}

/// Scan rotations `Δ = L a/b` (`L` the sampled angular span, `b ≤
/// max_denominator`, `a < b` coprime, plus `Δ = L`) and report the largest rotation order
/// `2π/Δ` that leaves the density invariant.
///
/// The shift is applied exactly in Fourier space, ring by ring, so no
/// interpolation error enters as long as the φ sampling resolves the
/// density.
pub fn detect_symmetry(field: &WaveField, max_denominator: u64) -> Result<SymmetryScan, QccError> {
    if max_denominator < 2 || field.phi.len() < 2 {
        return Err(QccError::Symmetry("need at least two angles and max_denominator ≥ 2".into()));
    }
    let span = field.grid.phi_span;
    let sheets = (span / TAU).round();
    if sheets < 1.0 || (span - TAU * sheets).abs() > 1e-9 * span {
        return Err(QccError::Symmetry(format!("φ span {span} is not a whole number of turns")));
    }
    let sheets = sheets as u64;
    let power = ring_power(field);
    let n = power.len();
    let total: f64 = power.iter().sum();
    if !(total > 0.0) {
        return Err(QccError::Symmetry("density vanishes on the grid".into()));
    }
    let mismatch = |a: u64, b: u64| -> f64 {
        let mut acc = 0.0;
        for (m, p) in power.iter().enumerate() {
            let freq = if m <= n / 2 { m as f64 } else { m as f64 - n as f64 };
            let theta = TAU * freq * a as f64 / b as f64;
            acc += p * 2.0 * (1.0 - theta.cos());
        }
        acc / total
    };
    // the full span is always a symmetry of the sampled data
    let mut scan = vec![((1, sheets), 0.0)];
    for b in 2..=max_denominator {
        for a in 1..b {
            if gcd(a, b) == 1 {
                // order = 2π/Δ = b / (a · sheets)
                let g = gcd(b, a * sheets);
                scan.push(((b / g, a * sheets / g), mismatch(a, b)));
            }
        }
    }
    let degenerate = scan.iter().all(|&(_, e)| e < SYMMETRY_TOL);
    let invariant: Vec<_> = scan.iter().filter(|&&(_, e)| e < SYMMETRY_TOL).collect();
    let order_of = |f: (u64, u64)| f.0 as f64 / f.1 as f64;
    let (fraction, value) = if let Some(best) = invariant.iter().max_by(|x, y| order_of(x.0).total_cmp(&order_of(y.0)))
    {
        (best.0, best.1)
    } else {
        let best = scan.iter().min_by(|x, y| x.1.total_cmp(&y.1)).expect("scan is nonempty");
        (best.0, best.1)
    };
    let ties = if invariant.is_empty() {
        scan.iter().filter(|&&(f, e)| f != fraction && (e - value).abs() <= TIE_TOL).map(|&(f, _)| f).collect()
    } else {
        Vec::new()
    };
    Ok(SymmetryScan { order: order_of(fraction), fraction, mismatch: value, ties, degenerate })
}
