//! Dormand–Prince 5(4) integrator with embedded error control.
//!
//! Fixed-size state (`[f64; N]`), per-component absolute tolerances, a stop
//! predicate checked after each accepted step, and optional location of a
//! sign change of a scalar event function (used to land exactly on an
//! orbit apex). Integration may run backwards in time (`t_end < t0`).

use thiserror::Error;

/// Right-hand side of `dy/dt = f(t, y)`.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &[f64; N]) -> [f64; N];
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl<const N: usize> {
    pub rtol: f64,
    pub atol: [f64; N],
    /// Initial step magnitude; chosen automatically when `None`.
    pub h_init: Option<f64>,
    /// Smallest step magnitude before the run is declared stuck, relative to
    /// `max(|t|, 1)`.
    pub h_min_rel: f64,
    pub max_steps: usize,
}

impl<const N: usize> StepControl<N> {
    pub fn uniform(tol: f64) -> Self {
        Self { rtol: tol, atol: [tol; N], h_init: None, h_min_rel: 1e-15, max_steps: 2_000_000 }
    }
}

/// Why an integration ended without reaching `t_end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Halt {
    Completed,
    /// The stop predicate fired.
    Stopped,
    /// The event function changed sign; the last state sits on the root.
    Event,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution<const N: usize> {
    pub t: Vec<f64>,
    pub y: Vec<[f64; N]>,
    pub halt: Halt,
    pub rejected: usize,
    pub evaluations: usize,
}

impl<const N: usize> Solution<N> {
    pub fn last(&self) -> (f64, [f64; N]) {
        (*self.t.last().expect("non-empty"), *self.y.last().expect("non-empty"))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError<const N: usize> {
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64, partial: Box<Solution<N>> },
    #[error("step budget of {max_steps} exhausted at t = {t}")]
    TooManySteps { t: f64, max_steps: usize, partial: Box<Solution<N>> },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64, partial: Box<Solution<N>> },
}

impl<const N: usize> OdeError<N> {
    pub fn partial(&self) -> &Solution<N> {
        match self {
            OdeError::StepUnderflow { partial, .. }
            | OdeError::TooManySteps { partial, .. }
            | OdeError::NonFinite { partial, .. } => partial,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// 5th minus 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] += h * acc;
    }
    out
}

/// One DP5 step: (new state, derivative at the new state, scaled error norm).
fn dp_step<S: OdeSystem<N>, const N: usize>(
    sys: &S,
    t: f64,
    y: &[f64; N],
    k1: &[f64; N],
    h: f64,
    ctl: &StepControl<N>,
) -> ([f64; N], [f64; N], f64) {
    let k2 = sys.rhs(t + C2 * h, &axpy(y, h, &[(A21, k1)]));
    let k3 = sys.rhs(t + C3 * h, &axpy(y, h, &[(A31, k1), (A32, &k2)]));
    let k4 = sys.rhs(t + C4 * h, &axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]));
    let k5 = sys.rhs(t + C5 * h, &axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
    let k6 = sys.rhs(t + h, &axpy(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
    let y_new = axpy(y, h, &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
    let k7 = sys.rhs(t + h, &y_new);
    let mut err2 = 0.0;
    for i in 0..N {
        let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let scale = ctl.atol[i] + ctl.rtol * y[i].abs().max(y_new[i].abs());
        err2 += (e / scale).powi(2);
    }
    (y_new, k7, (err2 / N as f64).sqrt())
}

fn initial_step<S: OdeSystem<N>, const N: usize>(
    sys: &S,
    t0: f64,
    y0: &[f64; N],
    f0: &[f64; N],
    ctl: &StepControl<N>,
) -> f64 {
    // Hairer–Wanner heuristic
    let sc = |i: usize| ctl.atol[i] + ctl.rtol * y0[i].abs();
    let d0 = (0..N).map(|i| (y0[i] / sc(i)).powi(2)).sum::<f64>().sqrt() / (N as f64).sqrt();
    let d1 = (0..N).map(|i| (f0[i] / sc(i)).powi(2)).sum::<f64>().sqrt() / (N as f64).sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1 = axpy(y0, h0, &[(1.0, f0)]);
    let f1 = sys.rhs(t0 + h0, &y1);
    let d2 = (0..N).map(|i| ((f1[i] - f0[i]) / sc(i)).powi(2)).sum::<f64>().sqrt() / (N as f64).sqrt() / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    (100.0 * h0).min(h1)
}

/// Integrate from `t0` to `t_end` (either direction).
///
/// `stop(t, y)` is evaluated after each accepted step; returning `true`
/// ends the run with [`Halt::Stopped`]. If `event` is given, a sign change
/// of `event(t, y)` across a step triggers a secant search on the step size
/// and the run ends with [`Halt::Event`] on the root.
/// Scalar event function of `(t, y)`, as taken by [`integrate`].
pub type Event<'a, const N: usize> = &'a dyn Fn(f64, &[f64; N]) -> f64;

pub fn integrate<S, P, const N: usize>(
    sys: &S,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    ctl: &StepControl<N>,
    mut stop: P,
    event: Option<Event<'_, N>>,
) -> Result<Solution<N>, OdeError<N>>
where
    S: OdeSystem<N>,
    P: FnMut(f64, &[f64; N]) -> bool,
{
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut sol = Solution { t: vec![t0], y: vec![y0], halt: Halt::Completed, rejected: 0, evaluations: 0 };
    if t_end == t0 {
        return Ok(sol);
    }
    let mut t = t0;
    let mut y = y0;
    let mut f = sys.rhs(t, &y);
    sol.evaluations += 1;
    let mut h = ctl.h_init.unwrap_or_else(|| {
        sol.evaluations += 2;
        initial_step(sys, t0, &y0, &f, ctl)
    });
    h = h.min((t_end - t0).abs());
    let mut steps = 0usize;
    let mut g_prev = event.map(|g| g(t, &y));
    loop {
        if steps >= ctl.max_steps {
            return Err(OdeError::TooManySteps { t, max_steps: ctl.max_steps, partial: Box::new(sol) });
        }
        let h_min = ctl.h_min_rel * t.abs().max(1.0);
        if h < h_min {
            return Err(OdeError::StepUnderflow { t, partial: Box::new(sol) });
        }
        let remaining = (t_end - t).abs();
        let last = h >= remaining;
        let h_try = if last { remaining } else { h };
        let (y_new, f_new, err) = dp_step(sys, t, &y, &f, dir * h_try, ctl);
        sol.evaluations += 6;
        steps += 1;
        if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
            // treat as a failed step and retry smaller
            sol.rejected += 1;
            h = 0.25 * h_try;
            if h < h_min {
                return Err(OdeError::NonFinite { t, partial: Box::new(sol) });
            }
            continue;
        }
        if err <= 1.0 {
            let t_new = if last { t_end } else { t + dir * h_try };
            if let (Some(g), Some(g0)) = (event, g_prev) {
                let g1 = g(t_new, &y_new);
                if g0 != 0.0 && g0.signum() != g1.signum() {
                    let (te, ye) = locate_root(sys, t, &y, &f, dir * h_try, g0, g1, g, ctl);
                    sol.t.push(te);
                    sol.y.push(ye);
                    sol.halt = Halt::Event;
                    return Ok(sol);
                }
                g_prev = Some(g1);
            }
            t = t_new;
            y = y_new;
            f = f_new;
            sol.t.push(t);
            sol.y.push(y);
            if stop(t, &y) {
                sol.halt = Halt::Stopped;
                return Ok(sol);
            }
            if last {
                return Ok(sol);
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = h_try * factor;
        } else {
            sol.rejected += 1;
            h = h_try * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
        }
    }
}

/// Secant/bisection search for the step `s` in `(0, h)` with `g(y(s)) = 0`,
/// re-stepping from the accepted state each time.
#[allow(clippy::too_many_arguments)]
fn locate_root<S: OdeSystem<N>, const N: usize>(
    sys: &S,
    t: f64,
    y: &[f64; N],
    f: &[f64; N],
    h: f64,
    g0: f64,
    g1: f64,
    g: &dyn Fn(f64, &[f64; N]) -> f64,
    ctl: &StepControl<N>,
) -> (f64, [f64; N]) {
    let (mut lo, mut hi) = (0.0, h);
    let (mut g_lo, mut g_hi) = (g0, g1);
    let mut best = (t + h, dp_step(sys, t, y, f, h, ctl).0);
    for _ in 0..80 {
        // Illinois-flavoured regula falsi, falling back to bisection
        let mut s = lo - g_lo * (hi - lo) / (g_hi - g_lo);
        if !(s.is_finite()) || (s - lo) * (s - hi) >= 0.0 {
            s = 0.5 * (lo + hi);
        }
        let (ys, _, _) = dp_step(sys, t, y, f, s, ctl);
        let gs = g(t + s, &ys);
        best = (t + s, ys);
        if gs == 0.0 || (hi - lo).abs() <= 4.0 * f64::EPSILON * (t.abs() + h.abs()) {
            break;
        }
        if gs.signum() == g_lo.signum() {
            lo = s;
            g_lo = gs;
            g_hi *= 0.5;
        } else {
            hi = s;
            g_hi = gs;
            g_lo *= 0.5;
        }
    }
    best
}
