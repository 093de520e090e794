use serde::Serialize;

use super::spin::rotate_in_plane;
use super::{petal_half_width, ClassicalError, ClassicalState, OrbitSpec, SpinVector};
use crate::ode::{self, Event, Halt, OdeError, OdeSystem, Solution, StepControl};

/// Reduced planar motion with the angular momentum fixed at `γ` and the
/// in-plane spin driven by `φ̇`. State: `[r, δ, p_r, S_x, S_y, t]` where
/// `δ = φ − φ_tip` is the angle measured from a petal tip (or asymptote).
///
/// Carrying `δ` instead of `φ` keeps the angle resolved where `cos k(φ−φ₀)`
/// is far below the spacing of doubles near `φ_tip`.
///
/// The independent variable is a regularised time `σ` with
/// `dt/dσ = (a_c²/γ)(r/a_c)^{k+2}`. Near a tip (and on the way out of an
/// open orbit) every component then varies exponentially in `σ`, so the
/// step size stays bounded where a step in `t` would drop below the
/// resolution of `t` itself. Near the apex `σ ≈ φ − φ₀`.
struct ReducedSystem {
    gamma: f64,
    rho: f64,
    k: f64,
    q: f64,
    a: f64,
}

impl OdeSystem<6> for ReducedSystem {
    fn rhs(&self, _sigma: f64, y: &[f64; 6]) -> [f64; 6] {
        let r = y[0];
        let u = r / self.a;
        let dt = self.a * self.a / self.gamma * u.powf(self.k + 2.0);
        // φ̇ dt/dσ
        let dphi = u.powf(self.k);
        let e = 2.0 * self.k + 2.0;
        let force = self.gamma * self.gamma / (r * r * r) - e * self.rho * r.powf(-(e + 1.0));
        [y[2] * dt, dphi, force * dt, self.q * dphi * y[4], -self.q * dphi * y[3], dt]
    }
}

/// Why a trajectory stopped short of `t_end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TruncationReason {
    /// Fell to `r ≤ r_floor` (petal tip).
    ReachedCentre,
    /// Passed `r ≥ r_escape` on an open orbit.
    Escaped,
    StepUnderflow,
    StepBudget,
    NonFinite,
}

impl std::fmt::Display for TruncationReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            TruncationReason::ReachedCentre => "reached the centre",
            TruncationReason::Escaped => "escaped to large radius",
            TruncationReason::StepUnderflow => "step size underflow",
            TruncationReason::StepBudget => "step budget exhausted",
            TruncationReason::NonFinite => "non-finite state",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionOptions {
    /// Local relative tolerance of the integrator.
    pub tol: f64,
    /// Integration of a closed petal stops at `r ≤ r_floor_rel · a_c`.
    pub r_floor_rel: f64,
    /// Integration of an open branch stops at `r ≥ r_escape_rel · a_c`.
    pub r_escape_rel: f64,
    pub max_steps: usize,
}

impl Default for MotionOptions {
    fn default() -> Self {
        Self { tol: 1e-12, r_floor_rel: 1e-6, r_escape_rel: 1e6, max_steps: 2_000_000 }
    }
}

impl MotionOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

/// States at the integrator steps, each with its angle from the nearest
/// petal tip `φ − φ_tip` as integrated (more precise than `phi` near a tip).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub states: Vec<ClassicalState>,
    pub tip_offsets: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> &ClassicalState {
        self.states.last().expect("non-empty trajectory")
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ClassicalState, f64)> {
        self.states.iter().zip(self.tip_offsets.iter().copied())
    }

    fn push(&mut self, s: ClassicalState, offset: f64) {
        self.states.push(s);
        self.tip_offsets.push(offset);
    }

    fn reversed(mut self) -> Self {
        self.states.reverse();
        self.tip_offsets.reverse();
        self
    }
}

fn system(spec: &OrbitSpec) -> ReducedSystem {
    ReducedSystem { gamma: spec.gamma, rho: spec.potential.rho(), k: spec.k(), q: spec.potential.q, a: spec.a_c() }
}

fn control(spec: &OrbitSpec, opts: &MotionOptions) -> StepControl<6> {
    let a = spec.a_c();
    let lambda = spec.potential.lambda;
    let tol = opts.tol;
    StepControl {
        rtol: tol,
        atol: [tol * a, tol, tol * spec.gamma / a, tol * lambda, tol * lambda, tol * a * a / spec.gamma],
        h_init: None,
        h_min_rel: 1e-15,
        max_steps: opts.max_steps,
    }
}

fn validate(spec: &OrbitSpec, s0: &SpinVector, opts: &MotionOptions) -> Result<(), ClassicalError> {
    spec.potential.check_spin(s0)?;
    if !(opts.tol > 0.0) {
        return Err(ClassicalError::NonPositive { name: "tol", value: opts.tol });
    }
    Ok(())
}

/// Apex state: `r = a_c`, `φ = φ₀`, `ṙ = 0`, `φ̇ = γ/a_c²`.
pub fn apex_state(spec: &OrbitSpec, s0: &SpinVector) -> ClassicalState {
    let a = spec.a_c();
    ClassicalState { r: a, phi: spec.phi0, r_dot: 0.0, phi_dot: spec.gamma / (a * a), spin: *s0, t: 0.0 }
}

#[derive(Debug, Clone, Copy)]
enum Until {
    Edge,
    Time(f64),
}

/// Far enough in `σ` that only a radius stop or an event ends the run.
const UNBOUNDED: f64 = 1e300;

/// Run from an apex state in the time direction `dir` until a radius stop
/// or the requested time.
fn run_from_apex(
    spec: &OrbitSpec,
    apex: &ClassicalState,
    dir: f64,
    until: Until,
    opts: &MotionOptions,
) -> Result<Trajectory, ClassicalError> {
    let sys = system(spec);
    let ctl = control(spec, opts);
    let a = spec.a_c();
    let closed = spec.k() > 0.0;
    let floor = opts.r_floor_rel * a;
    let escape = opts.r_escape_rel * a;
    let tip = apex.phi + dir * petal_half_width(spec);

    let mut reason = None;
    let stop = |_s: f64, y: &[f64; 6]| {
        let inward = dir * y[2] < 0.0;
        if closed && inward && y[0] <= floor {
            reason = Some(TruncationReason::ReachedCentre);
            true
        } else if !closed && !inward && y[0] >= escape {
            reason = Some(TruncationReason::Escaped);
            true
        } else {
            false
        }
    };
    let t_end = match until {
        Until::Time(t) => t,
        Until::Edge => 0.0,
    };
    let clock = move |_s: f64, y: &[f64; 6]| y[5] - t_end;
    let event: Option<Event<'_, 6>> = match until {
        Until::Edge => None,
        Until::Time(_) => Some(&clock),
    };

    let y0 = [apex.r, apex.phi - tip, apex.r_dot, apex.spin.sx, apex.spin.sy, apex.t];
    let sz = apex.spin.sz;
    let collect = |sol: &Solution<6>| {
        let mut out = Trajectory::default();
        for y in &sol.y {
            let state = ClassicalState {
                r: y[0],
                phi: tip + y[1],
                r_dot: y[2],
                phi_dot: spec.gamma / (y[0] * y[0]),
                spin: SpinVector::new(y[3], y[4], sz),
                t: y[5],
            };
            out.push(state, y[1]);
        }
        out
    };

    match ode::integrate(&sys, 0.0, y0, dir * UNBOUNDED, &ctl, stop, event) {
        Ok(sol) => match sol.halt {
            Halt::Completed | Halt::Event => Ok(collect(&sol)),
            Halt::Stopped => Err(ClassicalError::Truncated {
                reason: reason.unwrap_or(TruncationReason::ReachedCentre),
                partial: collect(&sol),
            }),
        },
        Err(e) => {
            let reason = match e {
                OdeError::StepUnderflow { .. } => TruncationReason::StepUnderflow,
                OdeError::TooManySteps { .. } => TruncationReason::StepBudget,
                OdeError::NonFinite { .. } => TruncationReason::NonFinite,
            };
            Err(ClassicalError::Truncated { reason, partial: collect(e.partial()) })
        }
    }
}

/// Integrate the reduced equations of motion from the apex for a time
/// `t_end` (negative runs backwards), with local tolerance `tol`.
///
/// Reaching the petal tip (`r ≤ 10⁻⁶ a_c`) or escaping an open orbit ends
/// the run with [`ClassicalError::Truncated`] carrying the trajectory so far.
pub fn integrate_motion(spec: &OrbitSpec, s0: &SpinVector, t_end: f64, tol: f64) -> Result<Trajectory, ClassicalError> {
    integrate_motion_with(spec, s0, t_end, &MotionOptions::with_tol(tol))
}

pub fn integrate_motion_with(
    spec: &OrbitSpec,
    s0: &SpinVector,
    t_end: f64,
    opts: &MotionOptions,
) -> Result<Trajectory, ClassicalError> {
    validate(spec, s0, opts)?;
    if !t_end.is_finite() {
        return Err(ClassicalError::NonFinite { name: "t_end" });
    }
    let apex = apex_state(spec, s0);
    if t_end == 0.0 {
        let mut only = Trajectory::default();
        only.push(apex, -petal_half_width(spec));
        return Ok(only);
    }
    run_from_apex(spec, &apex, t_end.signum(), Until::Time(t_end), opts)
}

fn run_to_edge(
    spec: &OrbitSpec,
    apex: &ClassicalState,
    dir: f64,
    opts: &MotionOptions,
) -> Result<Trajectory, ClassicalError> {
    match run_from_apex(spec, apex, dir, Until::Edge, opts) {
        Err(ClassicalError::Truncated {
            reason: TruncationReason::ReachedCentre | TruncationReason::Escaped,
            partial,
        }) => Ok(partial),
        Err(e) => Err(e),
        Ok(_) => unreachable!("an unbounded run ends on a radius stop"),
    }
}

/// One full petal: both halves around the apex, each run until the tip
/// floor (closed orbits) or the escape radius (open orbits). Time is zero
/// at the apex and negative on the incoming half.
pub fn integrate_petal(spec: &OrbitSpec, s0: &SpinVector, opts: &MotionOptions) -> Result<Trajectory, ClassicalError> {
    validate(spec, s0, opts)?;
    let apex = apex_state(spec, s0);
    let mut petal = run_to_edge(spec, &apex, -1.0, opts)?.reversed();
    let after = run_to_edge(spec, &apex, 1.0, opts)?;
    for (s, d) in after.iter().skip(1) {
        petal.push(*s, d);
    }
    Ok(petal)
}

/// Consecutive petals of a closed orbit joined through the centre.
#[derive(Debug, Clone, PartialEq)]
pub struct PetalChain {
    pub trajectory: Trajectory,
    /// Indices of the first state after each pass through the centre.
    pub restarts: Vec<usize>,
}

impl PetalChain {
    pub fn last(&self) -> &ClassicalState {
        self.trajectory.last()
    }
}

/// Follow a closed orbit from the apex at `φ₀` through `petals` passes
/// through the centre, ending on the apex `petals · 2π/k` further on.
///
/// The centre itself is never integrated through. Each petal's outgoing
/// half runs forward from its apex to the tip floor; the incoming half of
/// the next petal (apexes are `2π/k` apart) is its mirror image and is
/// integrated backwards from that apex down to the floor, then reversed.
/// Leaving the centre forwards instead would turn the rounding of `p_r` at
/// the floor into an energy error far larger than the apex energy scale.
///
/// The spin is linear in its initial value, so the incoming half is run
/// with a probe spin and the rotation it accumulates is applied to the
/// actual spin. Across the centre the spin turns by `q` times the skipped
/// angle. Time does not advance across the centre.
pub fn integrate_petals(
    spec: &OrbitSpec,
    s0: &SpinVector,
    petals: usize,
    opts: &MotionOptions,
) -> Result<PetalChain, ClassicalError> {
    validate(spec, s0, opts)?;
    if spec.k() <= 0.0 {
        return Err(ClassicalError::OpenOrbit);
    }
    let period = spec.petal_period();
    let mut chain = Trajectory::default();
    chain.push(apex_state(spec, s0), -petal_half_width(spec));
    let mut restarts = Vec::with_capacity(petals);
    for m in 0..petals {
        let start = *chain.last();
        let outgoing = run_to_edge(spec, &start, 1.0, opts)?;
        for (s, d) in outgoing.iter().skip(1) {
            chain.push(*s, d);
        }
        let tip = *chain.last();

        let plane = tip.spin.in_plane();
        let probe = SpinVector::new(if plane > 0.0 { plane } else { spec.potential.lambda }, 0.0, tip.spin.sz);
        let mut apex = apex_state(spec, &probe);
        apex.phi = spec.phi0 + (m + 1) as f64 * period;
        let incoming = run_to_edge(spec, &apex, -1.0, opts)?.reversed();

        let entry = incoming.states[0];
        let jumped = rotate_in_plane(&tip.spin, spec.potential.q * (entry.phi - tip.phi));
        let (ex, ey) = (entry.spin.sx, entry.spin.sy);
        let norm = ex * ex + ey * ey;
        restarts.push(chain.len());
        for (s, d) in incoming.iter() {
            // rotation taking the probe at the entry to the probe here, as a complex ratio
            let re = (s.spin.sx * ex + s.spin.sy * ey) / norm;
            let im = (s.spin.sy * ex - s.spin.sx * ey) / norm;
            let spin = SpinVector::new(jumped.sx * re - jumped.sy * im, jumped.sx * im + jumped.sy * re, jumped.sz);
            chain.push(ClassicalState { spin, t: tip.t + (s.t - entry.t), ..*s }, d);
        }
    }
    Ok(PetalChain { trajectory: chain, restarts })
}

/// Mechanical energy `p_r²/2 + L²/(2r²) + V(r)` with `L = r²φ̇`.
pub fn energy(spec: &OrbitSpec, state: &ClassicalState) -> f64 {
    kinetic_energy(state) + spec.potential.potential(state.r)
}

/// `p_r²/2 + L²/(2r²)`, the natural scale for judging [`energy`] residuals.
pub fn kinetic_energy(state: &ClassicalState) -> f64 {
    let l = state.r * state.r * state.phi_dot;
    0.5 * state.r_dot * state.r_dot + 0.5 * l * l / (state.r * state.r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{orbit_radius, orbit_radius_from_tip, spin_precession, PotentialSpec};
    use std::f64::consts::PI;

    fn orbit(k: &str, gamma: f64) -> OrbitSpec {
        OrbitSpec::new(PotentialSpec::with_defaults(k.parse().unwrap()).unwrap(), gamma, 0.0).unwrap()
    }

    fn spin() -> SpinVector {
        SpinVector::along([1.0, 1.0, 1.0], 0.5)
    }

    #[test]
    fn apex_energy_vanishes() {
        for (k, g) in [("1", 15.0), ("4", 60.0), ("7/3", 35.0), ("-6", 90.0)] {
            let o = orbit(k, g);
            let s = apex_state(&o, &spin());
            assert!(energy(&o, &s).abs() <= 1e-12 * kinetic_energy(&s), "{k}");
        }
    }

    #[test]
    fn off_shell_energy_is_nonzero() {
        let o = orbit("1", 15.0);
        let mut s = apex_state(&o, &spin());
        s.r *= 2.0;
        assert!(energy(&o, &s).abs() > 1.0);
    }

    #[test]
    fn short_arc_follows_closed_form() {
        let o = orbit("1", 15.0);
        let t = 0.2 * o.a_c() * o.a_c() / o.gamma;
        let traj = integrate_motion(&o, &spin(), t, 1e-12).unwrap();
        assert!(traj.len() > 2);
        assert!((traj.last().t - t).abs() < 1e-12 * t);
        for s in &traj.states {
            let r = orbit_radius(&o, s.phi).value().unwrap();
            assert!((s.r - r).abs() <= 1e-9 * r);
        }
    }

    #[test]
    fn petal_tip_truncates() {
        let o = orbit("4", 60.0);
        let err = integrate_motion(&o, &spin(), 1.0, 1e-10).unwrap_err();
        match err {
            ClassicalError::Truncated { reason, partial } => {
                assert_eq!(reason, TruncationReason::ReachedCentre);
                assert!(partial.last().r <= 1e-6 * o.a_c());
                assert!((partial.last().phi - PI / 8.0).abs() < 1e-9);
            }
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn petal_matches_closed_form_away_from_the_tips() {
        // closer to a tip the comparison at equal angle is ill-conditioned
        for (k, g) in [("1", 15.0), ("4", 60.0), ("-6", 90.0)] {
            let o = orbit(k, g);
            let p = integrate_petal(&o, &spin(), &MotionOptions::with_tol(1e-12)).unwrap();
            for (s, d) in p.iter() {
                assert!(energy(&o, s).abs() <= 1e-10 * kinetic_energy(s));
                if s.r < 0.05 * o.a_c() || s.r > 3.0 * o.a_c() {
                    continue;
                }
                let r = orbit_radius_from_tip(&o, d).value().unwrap();
                assert!(((s.r - r) / r).abs() < 1e-6, "{k}: {} vs {r}", s.r);
            }
        }
    }

    #[test]
    fn petal_is_symmetric_about_apex() {
        let o = orbit("4", 60.0);
        let p = integrate_petal(&o, &spin(), &MotionOptions::with_tol(1e-10)).unwrap();
        let first = p.states.first().unwrap();
        let last = p.last();
        assert!((first.phi + last.phi).abs() < 1e-12);
        assert!(first.t < 0.0 && last.t > 0.0);
        // t stalls at its own resolution right at the tips
        assert!(p.states.windows(2).all(|w| w[1].t >= w[0].t));
    }

    #[test]
    fn open_orbit_escapes() {
        let o = orbit("-6", 90.0);
        let p = integrate_petal(&o, &spin(), &MotionOptions::with_tol(1e-10)).unwrap();
        let last = p.last();
        assert!(last.r >= 1e6 * o.a_c());
        assert!((last.phi - PI / 12.0).abs() < 1e-3);
        assert!(matches!(integrate_petals(&o, &spin(), 1, &MotionOptions::default()), Err(ClassicalError::OpenOrbit)));
    }

    #[test]
    fn full_circle_spin_angle() {
        let o = orbit("1", 15.0);
        let s0 = spin();
        let chain = integrate_petals(&o, &s0, 1, &MotionOptions::default()).unwrap();
        let end = chain.last();
        assert_eq!(end.phi, 2.0 * PI);
        assert_eq!(end.r, o.a_c());
        assert!((s0.precession_angle_to(&end.spin) - 0.2 * PI).abs() < 1e-8);
        let closed = spin_precession(&o.potential, &s0, end.phi);
        assert!((closed.sx - end.spin.sx).abs() < 1e-9);
        assert_eq!(chain.restarts.len(), 1);
        let t = &chain.trajectory.states;
        assert!(t.windows(2).all(|w| w[1].t >= w[0].t));
    }

    #[test]
    fn several_petals_keep_precessing() {
        let o = orbit("7/3", 35.0);
        let s0 = SpinVector::new(0.5, 0.0, 0.0);
        let chain = integrate_petals(&o, &s0, 7, &MotionOptions::default()).unwrap();
        let end = chain.last();
        assert!((end.phi - 6.0 * PI).abs() < 1e-12);
        let want = spin_precession(&o.potential, &s0, 6.0 * PI);
        assert!((want.sx - end.spin.sx).abs() < 1e-9 && (want.sy - end.spin.sy).abs() < 1e-9);
    }

    #[test]
    fn rejects_wrong_spin_magnitude() {
        let o = orbit("1", 15.0);
        let bad = SpinVector::new(1.0, 0.0, 0.0);
        assert!(matches!(integrate_motion(&o, &bad, 1.0, 1e-8), Err(ClassicalError::SpinMagnitude { .. })));
    }
}
