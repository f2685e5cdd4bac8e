//! Numerical dynamics: trajectories, permanence probes, return maps and the
//! focal values of the weak focus at the origin.
//!
//! Two time parametrizations of the planar normal form are offered. The
//! physical one integrates `u' = e^{P1.w} - e^{P2.w}`, `v' = e^{P3.w} - e^{P4.w}`
//! with exponents clamped at ±700. The orbital one divides the field by the
//! positive factor `sum_i e^{P_i.w} / (1 + |w|)`, giving
//! `w' = (1 + |w|) (x1 - x2, x3 - x4)` with `x` the softmax of `P w`. Orbits are
//! identical; the orbital field grows at most linearly, so far-out orbits
//! neither overflow nor blow up in finite time, and a revolution takes a
//! comparable time near the origin and far from it.

use std::cell::Cell;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::l_infinity;
use crate::error::{Error, Result};
use crate::integrator::{integrate, DenseStep, Flow, OdeSystem, StepControl, Termination};
use crate::params::{jacobian, ExpParams, Params};
use crate::replicator::{softmax, ReplicatorSystem, SimplexState};
use crate::scalar::{Scalar, Sign};

/// Largest exponent evaluated before clamping.
pub const EXPONENT_CLAMP: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeScale {
    Physical,
    Orbital,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub horizon: f64,
    /// Emit uniformly spaced samples from the continuous extension instead
    /// of the accepted step points.
    pub dense_output: bool,
    pub sample_interval: Option<f64>,
    pub time_scale: TimeScale,
    pub max_steps: usize,
    /// Stop a planar trajectory once `|w|` exceeds this radius.
    pub escape_radius: Option<f64>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
            horizon: 100.0,
            dense_output: false,
            sample_interval: None,
            time_scale: TimeScale::Physical,
            max_steps: 5_000_000,
            escape_radius: None,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return Err(Error::InvalidArgument("horizon must be positive and finite".into()));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::InvalidArgument("max_step must be positive".into()));
        }
        if let Some(dt) = self.sample_interval {
            if !(dt > 0.0) {
                return Err(Error::InvalidArgument("sample_interval must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn orbital(horizon: f64) -> Self {
        IntegratorConfig {
            horizon,
            time_scale: TimeScale::Orbital,
            ..Default::default()
        }
    }

    fn control(&self) -> StepControl {
        StepControl {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step,
            max_steps: self.max_steps,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    ExponentClamped,
    Escaped,
    StepUnderflow,
    MaxSteps,
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub dim: usize,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub events: Vec<Event>,
    /// Whether the horizon (or a requested stop such as escape) was reached
    /// without numerical failure.
    pub completed: bool,
    pub time_scale: TimeScale,
}

impl Trajectory {
    pub fn last(&self) -> &[f64] {
        self.states.last().expect("trajectories hold the initial state")
    }

    pub fn has_event(&self, kind: EventKind) -> bool {
        self.events.iter().any(|e| e.kind == kind)
    }

    /// Unbounded growth: escaped past the radius or needed exponent clamping.
    pub fn unbounded(&self) -> bool {
        self.has_event(EventKind::Escaped) || self.has_event(EventKind::ExponentClamped)
    }
}

fn norm2(w: &[f64; 2]) -> f64 {
    w[0].hypot(w[1])
}

fn dot(p: &ExpParams, i: usize, w: &[f64; 2]) -> f64 {
    p.a[i] * w[0] + p.b[i] * w[1]
}

/// Physical-time field with exponent clamping.
struct PhysicalField<'a> {
    params: &'a ExpParams,
    clamped: Cell<bool>,
}

impl OdeSystem<2> for PhysicalField<'_> {
    fn rhs(&self, _t: f64, w: &[f64; 2]) -> [f64; 2] {
        let e = |i: usize| {
            let x = dot(self.params, i, w);
            if x.abs() > EXPONENT_CLAMP {
                self.clamped.set(true);
            }
            x.clamp(-EXPONENT_CLAMP, EXPONENT_CLAMP).exp()
        };
        [e(0) - e(1), e(2) - e(3)]
    }
}

/// Field multiplied by `(1 + |w|) / sum_i e^{P_i.w}`.
struct OrbitalField<'a> {
    params: &'a ExpParams,
}

impl OdeSystem<2> for OrbitalField<'_> {
    fn rhs(&self, _t: f64, w: &[f64; 2]) -> [f64; 2] {
        let e = [0, 1, 2, 3].map(|i| dot(self.params, i, w));
        let x = softmax(&e).x;
        let k = 1.0 + norm2(w);
        [k * (x[0] - x[1]), k * (x[2] - x[3])]
    }
}

/// The physical field `(u', v')` of the normal form at `w`, unclamped.
pub fn uv_field(params: &ExpParams, w: [f64; 2]) -> [f64; 2] {
    let e = |i: usize| dot(params, i, &w).exp();
    [e(0) - e(1), e(2) - e(3)]
}

/// The orbital field at `w`.
pub fn orbital_field(params: &ExpParams, w: [f64; 2]) -> [f64; 2] {
    OrbitalField { params }.rhs(0.0, &w)
}

/// Divergence of the field multiplied by `e^{-a1 u - b4 v}`.
pub fn scaled_divergence(params: &ExpParams, w: [f64; 2]) -> f64 {
    let (a, b) = (&params.a, &params.b);
    let (u, v) = (w[0], w[1]);
    (a[0] - a[1]) * ((a[1] - a[0]) * u + (b[1] - b[3]) * v).exp()
        + (b[2] - b[3]) * ((a[2] - a[0]) * u + (b[2] - b[3]) * v).exp()
}

struct Recorder<const N: usize> {
    times: Vec<f64>,
    states: Vec<Vec<f64>>,
    next_sample: Option<(f64, f64)>,
}

impl<const N: usize> Recorder<N> {
    fn new(t0: f64, y0: &[f64; N], cfg: &IntegratorConfig) -> Self {
        let next_sample = match (cfg.dense_output, cfg.sample_interval) {
            (true, Some(dt)) => Some((t0 + dt, dt)),
            _ => None,
        };
        Recorder {
            times: vec![t0],
            states: vec![y0.to_vec()],
            next_sample,
        }
    }

    fn record(&mut self, step: &DenseStep<N>, y_end: &[f64; N], t_end: f64) {
        match &mut self.next_sample {
            Some((next, dt)) => {
                while *next <= step.t1() + 1e-12 * dt.max(1.0) && *next <= t_end {
                    self.times.push(*next);
                    self.states.push(step.eval(*next).to_vec());
                    *next += *dt;
                }
            }
            None => {
                self.times.push(step.t1());
                self.states.push(y_end.to_vec());
            }
        }
    }
}

fn termination_event(term: &Termination) -> Option<EventKind> {
    match term {
        Termination::StepUnderflow => Some(EventKind::StepUnderflow),
        Termination::MaxSteps => Some(EventKind::MaxSteps),
        Termination::NonFinite => Some(EventKind::NonFinite),
        _ => None,
    }
}

/// Trajectory of the planar normal form from `initial`.
pub fn integrate_uv(params: &ExpParams, initial: [f64; 2], cfg: &IntegratorConfig) -> Result<Trajectory> {
    cfg.validate()?;
    params.check_finite()?;
    if !(initial[0].is_finite() && initial[1].is_finite()) {
        return Err(Error::NonFinite("initial state"));
    }
    let mut rec = Recorder::<2>::new(0.0, &initial, cfg);
    let mut events = Vec::new();
    let escape = cfg.escape_radius.unwrap_or(f64::INFINITY);
    let mut escaped = false;
    let ctl = cfg.control();

    let mut on_step = |step: &DenseStep<2>, clamped: bool, events: &mut Vec<Event>| {
        rec.record(step, &step.y1, cfg.horizon);
        if clamped && !events.iter().any(|e: &Event| e.kind == EventKind::ExponentClamped) {
            events.push(Event {
                t: step.t1(),
                kind: EventKind::ExponentClamped,
            });
        }
        if norm2(&step.y1) > escape {
            escaped = true;
            events.push(Event {
                t: step.t1(),
                kind: EventKind::Escaped,
            });
            return Flow::Stop;
        }
        Flow::Continue
    };

    let out = match cfg.time_scale {
        TimeScale::Physical => {
            let sys = PhysicalField {
                params,
                clamped: Cell::new(false),
            };
            integrate(&sys, 0.0, initial, cfg.horizon, &ctl, |s| {
                let c = sys.clamped.get();
                on_step(s, c, &mut events)
            })
        }
        TimeScale::Orbital => {
            let sys = OrbitalField { params };
            integrate(&sys, 0.0, initial, cfg.horizon, &ctl, |s| on_step(s, false, &mut events))
        }
    };
    if let Some(kind) = termination_event(&out.termination) {
        events.push(Event { t: out.t, kind });
    }
    Ok(Trajectory {
        dim: 2,
        times: rec.times,
        states: rec.states,
        completed: out.termination == Termination::Reached || escaped,
        events,
        time_scale: cfg.time_scale,
    })
}

/// Replicator field in log coordinates `y_i = ln x_i` over the support of the start.
struct LogSimplexField<'a> {
    sys: &'a ReplicatorSystem,
    support: [bool; 4],
}

impl LogSimplexField<'_> {
    fn to_simplex(&self, y: &[f64; 4]) -> [f64; 4] {
        let m = (0..4)
            .filter(|&i| self.support[i])
            .map(|i| y[i])
            .fold(f64::NEG_INFINITY, f64::max);
        let z: [f64; 4] = std::array::from_fn(|i| if self.support[i] { (y[i] - m).exp() } else { 0.0 });
        let s: f64 = z.iter().sum();
        z.map(|v| v / s)
    }
}

impl OdeSystem<4> for LogSimplexField<'_> {
    fn rhs(&self, _t: f64, y: &[f64; 4]) -> [f64; 4] {
        let x = self.to_simplex(y);
        let m = &self.sys.matrix;
        let ax: [f64; 4] = std::array::from_fn(|i| (0..4).map(|j| m[i][j] * x[j]).sum());
        let phi: f64 = (0..4).map(|i| x[i] * ax[i]).sum();
        std::array::from_fn(|i| if self.support[i] { ax[i] - phi } else { 0.0 })
    }

    fn project(&self, y: &mut [f64; 4]) {
        let m = (0..4)
            .filter(|&i| self.support[i])
            .map(|i| y[i])
            .fold(f64::NEG_INFINITY, f64::max);
        if m.abs() < 32.0 {
            return;
        }
        for i in 0..4 {
            if self.support[i] {
                y[i] -= m;
            }
        }
    }
}

/// Replicator trajectory, integrated in log coordinates so that faces of the
/// simplex stay invariant and `ln Q` is preserved up to rounding.
pub fn integrate_simplex(
    sys: &ReplicatorSystem,
    initial: &SimplexState,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    let x0 = SimplexState::new(initial.x)?.x;
    let support = x0.map(|v| v > 0.0);
    let field = LogSimplexField { sys, support };
    let mut y0 = x0.map(|v| if v > 0.0 { v.ln() } else { 0.0 });
    field.project(&mut y0);
    let mut rec = Recorder::<4>::new(0.0, &y0, cfg);
    let ctl = cfg.control();
    let out = integrate(&field, 0.0, y0, cfg.horizon, &ctl, |s| {
        rec.record(s, &s.y1, cfg.horizon);
        Flow::Continue
    });
    let mut states = rec.states;
    for st in states.iter_mut() {
        let x = field.to_simplex(&[st[0], st[1], st[2], st[3]]);
        st.copy_from_slice(&x);
    }
    if let Some(first) = states.first_mut() {
        first.copy_from_slice(&x0);
    }
    let mut events = Vec::new();
    if let Some(kind) = termination_event(&out.termination) {
        events.push(Event { t: out.t, kind });
    }
    Ok(Trajectory {
        dim: 4,
        times: rec.times,
        states,
        completed: out.termination == Termination::Reached,
        events,
        time_scale: TimeScale::Physical,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProbeVerdict {
    BoundedAttractor,
    Escaping,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitBehaviour {
    /// Beyond the escape radius and still growing.
    Escaping,
    /// Amplitude not increasing at the end of the run.
    Bounded,
    /// Amplitude unchanged between the first and last windows.
    Recurrent,
    /// Still growing but inside the escape radius.
    Growing,
    /// Integration failed.
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitSummary {
    pub start: [f64; 2],
    pub near_origin: bool,
    /// Largest `|w|` in each of the checkpoint windows.
    pub window_max: Vec<f64>,
    pub tail_max: f64,
    pub tail_min: f64,
    pub final_norm: f64,
    pub behaviour: OrbitBehaviour,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub initial_set: String,
    pub ring_radius: f64,
    pub escape_radius: f64,
    pub horizon: f64,
    pub time_scale: TimeScale,
    pub orbits: Vec<OrbitSummary>,
    pub verdict: ProbeVerdict,
}

/// Number of checkpoint windows an orbit's horizon is split into.
pub const PROBE_WINDOWS: usize = 10;
/// Relative amplitude change below which an orbit counts as recurrent.
pub const RECURRENCE_TOLERANCE: f64 = 1e-4;
/// Relative amplitude increase per window that counts as growth.
pub const GROWTH_TOLERANCE: f64 = 1e-6;
/// Amplitudes below this multiple of `abs_tol` are integration noise.
pub const AMPLITUDE_FLOOR_FACTOR: f64 = 1e3;

fn probe_orbit(params: &ExpParams, start: [f64; 2], near_origin: bool, escape_radius: f64, cfg: &IntegratorConfig) -> OrbitSummary {
    let horizon = cfg.horizon;
    let window = horizon / PROBE_WINDOWS as f64;
    let mut window_max = vec![0.0f64; PROBE_WINDOWS];
    window_max[0] = norm2(&start);
    let (mut tail_max, mut tail_min) = (f64::NEG_INFINITY, f64::INFINITY);
    let tail_start = 0.8 * horizon;
    let mut last_norm = norm2(&start);
    let mut hard_stop = false;
    let visit = |t: f64, w: [f64; 2], window_max: &mut Vec<f64>, tail_max: &mut f64, tail_min: &mut f64| {
        let r = norm2(&w);
        let k = ((t / window) as usize).min(PROBE_WINDOWS - 1);
        window_max[k] = window_max[k].max(r);
        if t >= tail_start {
            *tail_max = tail_max.max(r);
            *tail_min = tail_min.min(r);
        }
        r
    };
    let out = match cfg.time_scale {
        TimeScale::Orbital => {
            let sys = OrbitalField { params };
            integrate(&sys, 0.0, start, horizon, &cfg.control(), |s| {
                // sample inside the step so windows see the true extremes
                for j in 1..=4 {
                    let t = s.t0 + s.h * j as f64 / 4.0;
                    last_norm = visit(t, s.eval(t), &mut window_max, &mut tail_max, &mut tail_min);
                }
                if last_norm > 1e3 * escape_radius {
                    hard_stop = true;
                    return Flow::Stop;
                }
                Flow::Continue
            })
        }
        TimeScale::Physical => {
            let sys = PhysicalField {
                params,
                clamped: Cell::new(false),
            };
            integrate(&sys, 0.0, start, horizon, &cfg.control(), |s| {
                for j in 1..=4 {
                    let t = s.t0 + s.h * j as f64 / 4.0;
                    last_norm = visit(t, s.eval(t), &mut window_max, &mut tail_max, &mut tail_min);
                }
                if sys.clamped.get() || last_norm > 1e3 * escape_radius {
                    hard_stop = true;
                    return Flow::Stop;
                }
                Flow::Continue
            })
        }
    };
    let final_norm = norm2(&out.y);
    let behaviour = if hard_stop {
        OrbitBehaviour::Escaping
    } else if out.termination != Termination::Reached {
        OrbitBehaviour::Failed
    } else {
        let n = PROBE_WINDOWS;
        let last3 = &window_max[n - 3..];
        let floor = AMPLITUDE_FLOOR_FACTOR * cfg.abs_tol;
        let grows = |a: f64, b: f64| b > a * (1.0 + GROWTH_TOLERANCE) + floor;
        let increasing = grows(last3[0], last3[1]) && grows(last3[1], last3[2]);
        let head = window_max[1];
        let recurrent = head > floor && (window_max[n - 1] - head).abs() <= RECURRENCE_TOLERANCE * head;
        if increasing && tail_max > escape_radius {
            OrbitBehaviour::Escaping
        } else if recurrent {
            OrbitBehaviour::Recurrent
        } else if increasing {
            OrbitBehaviour::Growing
        } else {
            OrbitBehaviour::Bounded
        }
    };
    OrbitSummary {
        start,
        near_origin,
        window_max,
        tail_max,
        tail_min,
        final_norm,
        behaviour,
    }
}

/// Numerical witness for a bounded global attractor.
///
/// Orbits start on the circle of radius `ring_radius` and on a circle of
/// radius `1e-3 * ring_radius`. An orbit is escaping when its tail exceeds
/// ten times the ring radius and its windowed amplitude grows across the
/// last three checkpoints. The verdict is `Escaping` if any orbit escapes,
/// `Inconclusive` if an orbit fails, keeps growing inside the escape radius,
/// or if every orbit is recurrent, and `BoundedAttractor` otherwise.
pub fn permanence_probe(
    params: &ExpParams,
    cfg: &IntegratorConfig,
    ring_radius: f64,
    n_points: usize,
) -> Result<ProbeReport> {
    cfg.validate()?;
    params.check_finite()?;
    if !(ring_radius > 0.0) || !ring_radius.is_finite() {
        return Err(Error::InvalidArgument("ring radius must be positive".into()));
    }
    if n_points < 8 {
        return Err(Error::InvalidArgument("at least 8 probe points are required".into()));
    }
    let escape_radius = 10.0 * ring_radius;
    let inner = 1e-3 * ring_radius;
    let starts: Vec<([f64; 2], bool)> = [(ring_radius, false), (inner, true)]
        .iter()
        .flat_map(|&(r, near)| {
            (0..n_points).map(move |k| {
                let th = std::f64::consts::TAU * (k as f64 + 0.5) / n_points as f64;
                ([r * th.cos(), r * th.sin()], near)
            })
        })
        .collect();
    let orbits: Vec<OrbitSummary> = starts
        .par_iter()
        .map(|(s, near)| probe_orbit(params, *s, *near, escape_radius, cfg))
        .collect();
    let any = |b: OrbitBehaviour| orbits.iter().any(|o| o.behaviour == b);
    let verdict = if any(OrbitBehaviour::Escaping) {
        ProbeVerdict::Escaping
    } else if any(OrbitBehaviour::Failed)
        || any(OrbitBehaviour::Growing)
        || orbits.iter().all(|o| o.behaviour == OrbitBehaviour::Recurrent)
    {
        ProbeVerdict::Inconclusive
    } else {
        ProbeVerdict::BoundedAttractor
    };
    Ok(ProbeReport {
        initial_set: format!(
            "{n_points} points on |w| = {ring_radius} and {n_points} points on |w| = {inner}"
        ),
        ring_radius,
        escape_radius,
        horizon: cfg.horizon,
        time_scale: cfg.time_scale,
        orbits,
        verdict,
    })
}

/// Half-line `{r (cos θ, sin θ) : r > 0}` used as a Poincaré section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionRay {
    pub angle: f64,
}

impl Default for SectionRay {
    fn default() -> Self {
        SectionRay { angle: 0.0 }
    }
}

impl SectionRay {
    fn direction(&self) -> [f64; 2] {
        [self.angle.cos(), self.angle.sin()]
    }

    fn normal(&self) -> [f64; 2] {
        [-self.angle.sin(), self.angle.cos()]
    }

    pub fn point(&self, r: f64) -> [f64; 2] {
        let d = self.direction();
        [r * d[0], r * d[1]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub r: f64,
    pub slope: f64,
    pub stability: Stability,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleReport {
    pub section: SectionRay,
    /// `(r, R(r))`; `None` marks a sample that did not return.
    pub samples: Vec<(f64, Option<f64>)>,
    pub fixed_points: Vec<FixedPoint>,
    pub count: usize,
    pub resolution: f64,
}

/// Resolution to which fixed points of the return map are located.
pub const FIXED_POINT_RESOLUTION: f64 = 1e-8;
/// Accuracy of the section crossing, measured as distance to the section line.
pub const CROSSING_TOLERANCE: f64 = 1e-10;

/// Crossing of the section: time and point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub t: f64,
    pub point: [f64; 2],
}

/// First return to the section ray from the point at distance `r`, in
/// orbital time.
pub fn first_return(params: &ExpParams, section: &SectionRay, r: f64, cfg: &IntegratorConfig) -> Option<Crossing> {
    let d = section.direction();
    let nrm = section.normal();
    let w0 = section.point(r);
    let sys = OrbitalField { params };
    let f0 = sys.rhs(0.0, &w0);
    let orient = nrm[0] * f0[0] + nrm[1] * f0[1];
    if orient == 0.0 {
        return None;
    }
    let s = |w: &[f64; 2]| nrm[0] * w[0] + nrm[1] * w[1];
    let along = |w: &[f64; 2]| d[0] * w[0] + d[1] * w[1];
    let mut winding = 0.0f64;
    let mut found = None;
    let ctl = cfg.control();
    integrate(&sys, 0.0, w0, cfg.horizon, &ctl, |step| {
        let (a0, a1) = (step.y0[1].atan2(step.y0[0]), step.y1[1].atan2(step.y1[0]));
        let mut da = a1 - a0;
        if da > std::f64::consts::PI {
            da -= std::f64::consts::TAU;
        } else if da < -std::f64::consts::PI {
            da += std::f64::consts::TAU;
        }
        winding += da;
        let (s0, s1) = (s(&step.y0) * orient.signum(), s(&step.y1) * orient.signum());
        if winding.abs() > std::f64::consts::PI && s0 < 0.0 && s1 >= 0.0 {
            let (mut lo, mut hi) = (step.t0, step.t1());
            if hi < lo {
                std::mem::swap(&mut lo, &mut hi);
            }
            let mut t = hi;
            let mut w = step.y1;
            for _ in 0..200 {
                t = 0.5 * (lo + hi);
                w = step.eval(t);
                let sv = s(&w) * orient.signum();
                if sv.abs() < CROSSING_TOLERANCE || hi - lo < 1e-15 * t.abs().max(1.0) {
                    break;
                }
                if sv < 0.0 {
                    lo = t;
                } else {
                    hi = t;
                }
            }
            if along(&w) > 0.0 {
                found = Some(Crossing { t, point: w });
                return Flow::Stop;
            }
        }
        Flow::Continue
    });
    found
}

/// Radial coordinate of the first return, `R(r)`.
pub fn return_map(params: &ExpParams, section: &SectionRay, r: f64, cfg: &IntegratorConfig) -> Option<f64> {
    let d = section.direction();
    first_return(params, section, r, cfg).map(|c| d[0] * c.point[0] + d[1] * c.point[1])
}

/// `n` points spaced geometrically in `[r_min, r_max]`.
pub fn log_grid(r_min: f64, r_max: f64, n: usize) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![r_min];
    }
    let (l0, l1) = (r_min.ln(), r_max.ln());
    (0..n).map(|i| (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Return-map samples over `r_grid` and the fixed points they bracket.
pub fn poincare_return_map(
    params: &ExpParams,
    section: &SectionRay,
    r_grid: &[f64],
    cfg: &IntegratorConfig,
) -> Result<CycleReport> {
    cfg.validate()?;
    params.check_finite()?;
    let db = params.deadband();
    if db.sign(&jacobian(params).det, 2) == Sign::Zero {
        return Err(Error::Degenerate("det J = 0: the origin is not an isolated equilibrium".into()));
    }
    if r_grid.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
        return Err(Error::InvalidArgument("section radii must be positive".into()));
    }
    let mut grid = r_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let cfg = IntegratorConfig {
        time_scale: TimeScale::Orbital,
        ..*cfg
    };
    let samples: Vec<(f64, Option<f64>)> = grid
        .par_iter()
        .map(|&r| (r, return_map(params, section, r, &cfg)))
        .collect();

    let brackets: Vec<(usize, f64, f64)> = samples
        .windows(2)
        .enumerate()
        .filter_map(|(i, w)| match (w[0].1, w[1].1) {
            (Some(r0), Some(r1)) => {
                let (g0, g1) = (r0 - w[0].0, r1 - w[1].0);
                (g0 == 0.0 || g0.signum() != g1.signum()).then_some((i, w[0].0, w[1].0))
            }
            _ => None,
        })
        .collect();

    let mut fixed_points: Vec<FixedPoint> = brackets
        .par_iter()
        .filter_map(|&(i, lo, hi)| {
            let g = |r: f64| return_map(params, section, r, &cfg).map(|x| x - r);
            let (mut lo, mut hi) = (lo, hi);
            let mut glo = samples[i].1? - lo;
            if glo == 0.0 {
                hi = lo;
            }
            while hi - lo > FIXED_POINT_RESOLUTION {
                let mid = 0.5 * (lo + hi);
                let gm = g(mid)?;
                if gm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if gm.signum() == glo.signum() {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            let r = 0.5 * (lo + hi);
            let h = (1e-4 * r).min(0.25 * (samples[i + 1].0 - samples[i].0)).max(1e-7 * r);
            let (rp, rm) = (return_map(params, section, r + h, &cfg)?, return_map(params, section, r - h, &cfg)?);
            let slope = (rp - rm) / (2.0 * h);
            let stability = if slope.abs() < 1.0 { Stability::Stable } else { Stability::Unstable };
            Some(FixedPoint { r, slope, stability })
        })
        .collect();
    fixed_points.sort_by(|a, b| a.r.total_cmp(&b.r));
    fixed_points.dedup_by(|a, b| (a.r - b.r).abs() <= FIXED_POINT_RESOLUTION * 10.0);
    Ok(CycleReport {
        section: *section,
        count: fixed_points.len(),
        samples,
        fixed_points,
        resolution: FIXED_POINT_RESOLUTION,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationQuantities<S = f64> {
    pub trace: S,
    pub det: S,
    pub d: S,
    /// `D b2 - (a3 - a4) b3 b4`, the factor deciding the sign of `L1`.
    pub l1_bracket: S,
    pub l1: f64,
    pub l_infinity: Option<S>,
}

impl<S: Scalar> BifurcationQuantities<S> {
    pub fn to_f64(&self) -> BifurcationQuantities<f64> {
        BifurcationQuantities {
            trace: self.trace.to_f64(),
            det: self.det.to_f64(),
            d: self.d.to_f64(),
            l1_bracket: self.l1_bracket.to_f64(),
            l1: self.l1,
            l_infinity: self.l_infinity.as_ref().map(Scalar::to_f64),
        }
    }
}

/// First focal value of the weak focus at the origin, in the frame
/// `a1 = b1 = 0`, `tr J = 0`, `det J > 0`:
///
/// `L1 = -(π/8) (b3 - b4) [D b2 - (a3 - a4) b3 b4] / (b2 sqrt(det J))`,
/// `D = a3 a4 + a3 b4 - a4 b3`.
pub fn focal_value_l1<S: Scalar>(params: &Params<S>) -> Result<BifurcationQuantities<S>> {
    params.check_finite()?;
    let db = params.deadband();
    if !db.is_zero(&params.a[0], 1) || !db.is_zero(&params.b[0], 1) {
        return Err(Error::Configuration("the focal value formula needs a1 = b1 = 0".into()));
    }
    let j = jacobian(params);
    if !db.is_zero(&j.trace, 1) {
        return Err(Error::Configuration("the focal value formula needs tr J = 0".into()));
    }
    if db.sign(&j.det, 2) != Sign::Pos {
        return Err(Error::Configuration("the focal value formula needs det J > 0".into()));
    }
    let [_, _, a3, a4] = params.a.clone();
    let [_, b2, b3, b4] = params.b.clone();
    let d = a3.clone() * a4.clone() + a3.clone() * b4.clone() - a4.clone() * b3.clone();
    let bracket = d.clone() * b2.clone() - (a3 - a4) * b3.clone() * b4.clone();
    let l1 = if db.is_zero(&bracket, 3) || db.is_zero(&(b3.clone() - b4.clone()), 1) {
        0.0
    } else {
        -std::f64::consts::FRAC_PI_8 * (b3 - b4).to_f64() * bracket.to_f64() / (b2.to_f64() * j.det.to_f64().sqrt())
    };
    Ok(BifurcationQuantities {
        trace: j.trace,
        det: j.det,
        d,
        l1_bracket: bracket,
        l1,
        l_infinity: l_infinity(params).ok(),
    })
}

/// `a = (0, -8 - mu, 10, -20)`, `b = (0, 35 - epsilon, 20, 28)`.
pub fn three_cycle_scenario(epsilon: f64, mu: f64) -> Result<ExpParams> {
    if !(epsilon >= 0.0 && mu >= 0.0) || !epsilon.is_finite() || !mu.is_finite() {
        return Err(Error::InvalidArgument("epsilon and mu must be non-negative".into()));
    }
    Ok(ExpParams::from_arrays([0.0, -8.0 - mu, 10.0, -20.0], [0.0, 35.0 - epsilon, 20.0, 28.0]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_is_stationary() {
        let p = three_cycle_scenario(0.1, 0.0).unwrap();
        let t = integrate_uv(&p, [0.0, 0.0], &IntegratorConfig::default()).unwrap();
        assert!(t.completed);
        assert_eq!(t.last(), &[0.0, 0.0]);
    }

    #[test]
    fn baseline_focal_values() {
        let p = three_cycle_scenario(0.0, 0.0).unwrap();
        let q = focal_value_l1(&p).unwrap();
        assert_eq!((q.trace, q.det, q.d, q.l1), (0.0, 986.0, 480.0, 0.0));
        assert_eq!(q.l_infinity, Some(0.0));
    }

    #[test]
    fn focal_value_preconditions() {
        let p = three_cycle_scenario(0.0, 0.5).unwrap();
        assert!(matches!(focal_value_l1(&p), Err(Error::Configuration(_))));
        let mut p = three_cycle_scenario(0.0, 0.0).unwrap();
        p.a[0] = 1.0;
        assert!(focal_value_l1(&p).is_err());
        assert!(three_cycle_scenario(-1.0, 0.0).is_err());
    }

    #[test]
    fn b3_equal_b4_gives_zero_l1() {
        let p = ExpParams::from_arrays([0.0, 0.0, 2.0, -1.0], [0.0, 1.0, 3.0, 3.0]);
        assert_eq!(focal_value_l1(&p).unwrap().l1, 0.0);
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(0.01, 100.0, 5);
        assert_eq!(g.len(), 5);
        assert!((g[0] - 0.01).abs() < 1e-15 && (g[4] - 100.0).abs() < 1e-12);
        assert!((g[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sampled_output_is_uniform() {
        let p = ExpParams::from_arrays([-1.0, 0.0, 1.0, 0.0], [0.0, 0.5, -0.5, 0.0]);
        let cfg = IntegratorConfig {
            horizon: 2.0,
            dense_output: true,
            sample_interval: Some(0.25),
            ..Default::default()
        };
        let t = integrate_uv(&p, [0.3, -0.2], &cfg).unwrap();
        assert_eq!(t.times.len(), 9);
        for (k, ti) in t.times.iter().enumerate() {
            assert!((ti - 0.25 * k as f64).abs() < 1e-12);
        }
    }
}
