//! Numerical integration of q̇ = p, ṗ = −∇V for unit mass with an adaptive
//! Dormand–Prince 5(4) pair. Used as the reference for every closed form.

use std::collections::BTreeMap;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::phase::PhaseState;
use crate::potential::PotentialModel;

/// Phase-space return distance below which a candidate period is accepted.
pub const CLOSURE_THRESHOLD: f64 = 1e-6;
const MAX_STEPS: usize = 20_000_000;
const SAFETY: f64 = 0.8;

type State = [f64; 6];

/// A named function of the phase point whose drift is tracked.
pub struct Invariant<'a> {
    pub name: &'a str,
    pub eval: &'a (dyn Fn(&PhaseState) -> f64 + Sync),
}

impl<'a> Invariant<'a> {
    pub fn new(name: &'a str, eval: &'a (dyn Fn(&PhaseState) -> f64 + Sync)) -> Self {
        Self { name, eval }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Drift {
    pub max_abs: f64,
    pub max_rel: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepStats {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub rejected: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub reason: String,
    pub last_good_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrationRun {
    /// Ordered along the direction of integration.
    pub samples: Vec<PhaseState>,
    pub tolerance: f64,
    pub step_stats: StepStats,
    /// Checked at every accepted step, relative to the initial value.
    pub drift: BTreeMap<String, Drift>,
    pub failure: Option<Failure>,
}

impl IntegrationRun {
    pub fn is_complete(&self) -> bool {
        self.failure.is_none()
    }

    pub fn last(&self) -> &PhaseState {
        self.samples
            .last()
            .expect("a run holds at least the initial state")
    }
}

fn pack(s: &PhaseState) -> State {
    [s.x, s.y, s.z, s.vx, s.vy, s.vz]
}

fn unpack(y: &State, t: f64) -> PhaseState {
    PhaseState::new([y[0], y[1], y[2]], [y[3], y[4], y[5]], t)
}

fn rhs<P: PotentialModel + ?Sized>(p: &P, y: &State) -> State {
    let g = p.gradient(&Vector3::new(y[0], y[1], y[2]));
    [y[3], y[4], y[5], -g.x, -g.y, -g.z]
}

fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..6 {
            out[i] += h * c * k[i];
        }
    }
    out
}

// Dormand–Prince 5(4) tableau.
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
// fifth-order weights minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

struct Step {
    y: State,
    f: State,
    err: State,
}

/// One Dormand–Prince step; `k1` is f(y). The returned `f` is f(y_new) (FSAL).
fn dp_step<P: PotentialModel + ?Sized>(p: &P, y: &State, k1: &State, h: f64) -> Step {
    let k2 = rhs(p, &axpy(y, h, &[(A21, k1)]));
    let k3 = rhs(p, &axpy(y, h, &[(A31, k1), (A32, &k2)]));
    let k4 = rhs(p, &axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]));
    let k5 = rhs(
        p,
        &axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
    );
    let k6 = rhs(
        p,
        &axpy(
            y,
            h,
            &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        ),
    );
    let y_new = axpy(
        y,
        h,
        &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
    );
    let k7 = rhs(p, &y_new);
    let mut err = [0.0; 6];
    for i in 0..6 {
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    // C2..C5 only matter for time-dependent right-hand sides.
    let _ = (C2, C3, C4, C5);
    Step {
        y: y_new,
        f: k7,
        err,
    }
}

/// Quintic Hermite interpolant of q from (q, q̇, q̈) at both step ends; the
/// velocity is its derivative. Costs no extra force evaluations.
fn hermite(t0: f64, y0: &State, f0: &State, t1: f64, y1: &State, f1: &State, t: f64) -> State {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let (s2, s3, s4, s5) = (s * s, s.powi(3), s.powi(4), s.powi(5));
    let w = [
        1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5,
        s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5,
        0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5,
        10.0 * s3 - 15.0 * s4 + 6.0 * s5,
        -4.0 * s3 + 7.0 * s4 - 3.0 * s5,
        0.5 * s3 - s4 + 0.5 * s5,
    ];
    let dw = [
        -30.0 * s2 + 60.0 * s3 - 30.0 * s4,
        1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4,
        s - 4.5 * s2 + 6.0 * s3 - 2.5 * s4,
        30.0 * s2 - 60.0 * s3 + 30.0 * s4,
        -12.0 * s2 + 28.0 * s3 - 15.0 * s4,
        1.5 * s2 - 4.0 * s3 + 2.5 * s4,
    ];
    let mut out = [0.0; 6];
    for i in 0..3 {
        let c = [
            y0[i],
            h * y0[i + 3],
            h * h * f0[i + 3],
            y1[i],
            h * y1[i + 3],
            h * h * f1[i + 3],
        ];
        out[i] = (0..6).map(|j| w[j] * c[j]).sum();
        out[i + 3] = (0..6).map(|j| dw[j] * c[j]).sum::<f64>() / h;
    }
    out
}

fn error_norm(y: &State, y_new: &State, err: &State, tol: f64) -> f64 {
    (0..6)
        .map(|i| err[i].abs() / (tol * y[i].abs().max(y_new[i].abs()).max(1.0)))
        .fold(0.0, f64::max)
}

struct DriftTracker<'a> {
    invariants: &'a [Invariant<'a>],
    initial: Vec<f64>,
    drift: Vec<Drift>,
}

impl<'a> DriftTracker<'a> {
    fn new(invariants: &'a [Invariant<'a>], s: &PhaseState) -> Self {
        Self {
            invariants,
            initial: invariants.iter().map(|inv| (inv.eval)(s)).collect(),
            drift: vec![Drift::default(); invariants.len()],
        }
    }

    fn update(&mut self, s: &PhaseState) {
        for ((inv, v0), d) in self
            .invariants
            .iter()
            .zip(&self.initial)
            .zip(&mut self.drift)
        {
            let diff = ((inv.eval)(s) - v0).abs();
            let diff = if diff.is_nan() { f64::INFINITY } else { diff };
            d.max_abs = d.max_abs.max(diff);
            d.max_rel = d.max_rel.max(diff / v0.abs().max(f64::MIN_POSITIVE));
        }
    }

    fn finish(self) -> BTreeMap<String, Drift> {
        self.invariants
            .iter()
            .map(|inv| inv.name.to_string())
            .zip(self.drift)
            .collect()
    }
}

/// Integrates from `initial` to `t_end`, returning the initial and final states.
pub fn integrate<P: PotentialModel + ?Sized>(
    potential: &P,
    initial: &PhaseState,
    t_end: f64,
    tol: f64,
    invariants: &[Invariant<'_>],
) -> Result<IntegrationRun> {
    integrate_at(potential, initial, &[initial.t, t_end], tol, invariants)
}

/// Integrates through `times`, which must start at the initial time and be
/// monotone in one direction; states at the requested times come from quintic
/// Hermite interpolation on the accepted steps, except the last, which is a
/// step endpoint.
pub fn integrate_at<P: PotentialModel + ?Sized>(
    potential: &P,
    initial: &PhaseState,
    times: &[f64],
    tol: f64,
    invariants: &[Invariant<'_>],
) -> Result<IntegrationRun> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    if !initial.is_finite() {
        return Err(invalid("initial state must be finite"));
    }
    potential.check_position(&initial.position())?;
    let t0 = initial.t;
    let t_end = *times.last().ok_or_else(|| invalid("no sample times"))?;
    if !t_end.is_finite() || times.iter().any(|t| !t.is_finite()) {
        return Err(invalid("sample times must be finite"));
    }
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut prev_t = t0;
    for &t in times {
        if (t - prev_t) * dir < 0.0 {
            return Err(invalid(
                "sample times must be monotone in the direction of integration",
            ));
        }
        prev_t = t;
    }

    let mut tracker = DriftTracker::new(invariants, initial);
    let mut samples = Vec::with_capacity(times.len());
    let mut pending = times.iter().copied().peekable();
    while let Some(&t) = pending.peek() {
        if t == t0 {
            samples.push(*initial);
            pending.next();
        } else {
            break;
        }
    }

    let mut t = t0;
    let mut y = pack(initial);
    let mut f = rhs(potential, &y);
    let span = (t_end - t0).abs();
    let mut stats = StepStats {
        min: f64::INFINITY,
        max: 0.0,
        count: 0,
        rejected: 0,
    };
    let mut failure = None;

    let ynorm = y.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let fnorm = f.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut h = if fnorm > 0.0 {
        (0.01 * (1.0 + ynorm) / fnorm).min(span)
    } else {
        span
    };
    h = h.max(1e-6 * span).max(f64::MIN_POSITIVE);

    while (t_end - t) * dir > 0.0 {
        if stats.count + stats.rejected >= MAX_STEPS {
            failure = Some(Failure {
                reason: "step budget exhausted".into(),
                last_good_time: t,
            });
            break;
        }
        let remaining = (t_end - t).abs();
        let last = h >= remaining;
        let h_try = if last { remaining } else { h };
        let step = dp_step(potential, &y, &f, dir * h_try);
        let en = error_norm(&y, &step.y, &step.err, tol);
        let finite = en.is_finite() && step.y.iter().all(|v| v.is_finite());
        if finite && en <= 1.0 {
            let t_new = if last { t_end } else { t + dir * h_try };
            let candidate = unpack(&step.y, t_new);
            if let Err(e) = potential.check_position(&candidate.position()) {
                failure = Some(Failure {
                    reason: e.to_string(),
                    last_good_time: t,
                });
                break;
            }
            while let Some(&ts) = pending.peek() {
                if (ts - t_new) * dir > 0.0 {
                    break;
                }
                let ys = if ts == t_new {
                    step.y
                } else {
                    hermite(t, &y, &f, t_new, &step.y, &step.f, ts)
                };
                samples.push(unpack(&ys, ts));
                pending.next();
            }
            stats.count += 1;
            stats.min = stats.min.min(h_try);
            stats.max = stats.max.max(h_try);
            tracker.update(&candidate);
            t = t_new;
            y = step.y;
            f = step.f;
        } else {
            stats.rejected += 1;
        }
        let factor = if !finite {
            0.2
        } else if en == 0.0 {
            5.0
        } else {
            (SAFETY * en.powf(-0.2)).clamp(0.2, 5.0)
        };
        h = h_try * factor;
        if h <= 4.0 * f64::EPSILON * t.abs().max(span) {
            failure = Some(Failure {
                reason: "step size underflow".into(),
                last_good_time: t,
            });
            break;
        }
    }
    if stats.count == 0 {
        stats.min = 0.0;
    }
    Ok(IntegrationRun {
        samples,
        tolerance: tol,
        step_stats: stats,
        drift: tracker.finish(),
        failure,
    })
}

/// `n` equal Dormand–Prince steps (fifth-order solution, no error control).
pub fn integrate_fixed<P: PotentialModel + ?Sized>(
    potential: &P,
    initial: &PhaseState,
    t_end: f64,
    n: usize,
) -> Result<PhaseState> {
    if n == 0 {
        return Err(invalid("need at least one step"));
    }
    let h = (t_end - initial.t) / n as f64;
    let mut y = pack(initial);
    let mut f = rhs(potential, &y);
    for _ in 0..n {
        let s = dp_step(potential, &y, &f, h);
        y = s.y;
        f = s.f;
    }
    Ok(unpack(&y, t_end))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Closure {
    /// √(|Δr|²/|r0|² + |Δv|²/|v0|²) after one candidate period.
    pub distance: f64,
    pub closed: bool,
}

pub fn closure_test<P: PotentialModel + ?Sized>(
    potential: &P,
    initial: &PhaseState,
    candidate_period: f64,
    tol: f64,
) -> Result<Closure> {
    if !(candidate_period > 0.0 && candidate_period.is_finite()) {
        return Err(invalid(format!(
            "candidate period must be positive, got {candidate_period}"
        )));
    }
    let run = integrate(potential, initial, initial.t + candidate_period, tol, &[])?;
    if let Some(f) = &run.failure {
        return Err(crate::error::Error::Numeric(format!(
            "integration stopped at t = {}: {}",
            f.last_good_time, f.reason
        )));
    }
    let end = run.last();
    let scale = |v: f64| if v > 0.0 { v } else { 1.0 };
    let dr = (end.position() - initial.position()).norm() / scale(initial.position().norm());
    let dv = (end.velocity() - initial.velocity()).norm() / scale(initial.velocity().norm());
    let distance = dr.hypot(dv);
    Ok(Closure {
        distance,
        closed: distance < CLOSURE_THRESHOLD,
    })
}
