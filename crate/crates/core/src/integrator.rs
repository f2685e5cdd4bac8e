//! Dormand–Prince 5(4) with step-size control and continuous extension.

/// Right-hand side plus an optional projection applied after each accepted step.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &[f64; N]) -> [f64; N];

    fn project(&self, _y: &mut [f64; N]) {}
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
            max_steps: 10_000_000,
        }
    }
}

/// One accepted step with its interpolant.
#[derive(Debug, Clone)]
pub struct DenseStep<const N: usize> {
    pub t0: f64,
    pub h: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    r: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    /// State at `t` in `[t0, t0 + h]`.
    pub fn eval(&self, t: f64) -> [f64; N] {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let r = &self.r;
        std::array::from_fn(|i| r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i]))))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    Reached,
    Stopped,
    StepUnderflow,
    MaxSteps,
    NonFinite,
}

#[derive(Debug, Clone)]
pub struct Outcome<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub steps: usize,
    pub rejected: usize,
    pub termination: Termination,
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
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn comb<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    std::array::from_fn(|i| y[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
}

fn initial_step<const N: usize, S: OdeSystem<N>>(
    sys: &S,
    t0: f64,
    y0: &[f64; N],
    f0: &[f64; N],
    dir: f64,
    ctl: &StepControl,
) -> f64 {
    let sc: [f64; N] = std::array::from_fn(|i| ctl.abs_tol + ctl.rel_tol * y0[i].abs());
    let norm = |v: &[f64; N]| (v.iter().zip(&sc).map(|(x, s)| (x / s).powi(2)).sum::<f64>() / N as f64).sqrt();
    let (d0, d1) = (norm(y0), norm(f0));
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1: [f64; N] = std::array::from_fn(|i| y0[i] + dir * h0 * f0[i]);
    let f1 = sys.rhs(t0 + dir * h0, &y1);
    let diff: [f64; N] = std::array::from_fn(|i| f1[i] - f0[i]);
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(ctl.max_step)
}

/// Integrate from `t0` to `t_end`, calling `on_step` after every accepted step.
pub fn integrate<const N: usize, S, F>(
    sys: &S,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    ctl: &StepControl,
    mut on_step: F,
) -> Outcome<N>
where
    S: OdeSystem<N>,
    F: FnMut(&DenseStep<N>) -> Flow,
{
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = y0;
    let mut k1 = sys.rhs(t, &y);
    let outcome = |t: f64, y: [f64; N], steps, rejected, termination| Outcome {
        t,
        y,
        steps,
        rejected,
        termination,
    };
    if t0 == t_end {
        return outcome(t, y, 0, 0, Termination::Reached);
    }
    if k1.iter().any(|v| !v.is_finite()) {
        return outcome(t, y, 0, 0, Termination::NonFinite);
    }
    let mut h = initial_step(sys, t, &y, &k1, dir, ctl);
    let (mut steps, mut rejected) = (0usize, 0usize);
    let mut last_reject = false;
    loop {
        if steps + rejected >= ctl.max_steps {
            return outcome(t, y, steps, rejected, Termination::MaxSteps);
        }
        let remaining = (t_end - t) * dir;
        let mut hs = h.min(ctl.max_step).min(remaining);
        let at_end = hs >= remaining;
        if at_end {
            hs = remaining;
        }
        if hs < 1e-14 * t.abs().max(1.0) && !at_end {
            return outcome(t, y, steps, rejected, Termination::StepUnderflow);
        }
        let hh = dir * hs;
        let k2 = sys.rhs(t + C2 * hh, &comb(&y, hh, &[(A21, &k1)]));
        let k3 = sys.rhs(t + C3 * hh, &comb(&y, hh, &[(A31, &k1), (A32, &k2)]));
        let k4 = sys.rhs(t + C4 * hh, &comb(&y, hh, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = sys.rhs(
            t + C5 * hh,
            &comb(&y, hh, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = sys.rhs(
            t + hh,
            &comb(&y, hh, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y1 = comb(&y, hh, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = sys.rhs(t + hh, &y1);

        let mut err = 0.0;
        for i in 0..N {
            let e = hh * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = ctl.abs_tol + ctl.rel_tol * y[i].abs().max(y1[i].abs());
            err += (e / sc).powi(2);
        }
        let err = (err / N as f64).sqrt();
        if !err.is_finite() || y1.iter().any(|v| !v.is_finite()) {
            rejected += 1;
            h = hs * 0.1;
            last_reject = true;
            continue;
        }
        if err <= 1.0 {
            let mut r = [[0.0; N]; 5];
            for i in 0..N {
                let dy = y1[i] - y[i];
                let bspl = hh * k1[i] - dy;
                r[0][i] = y[i];
                r[1][i] = dy;
                r[2][i] = bspl;
                r[3][i] = dy - hh * k7[i] - bspl;
                r[4][i] = hh * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            let step = DenseStep {
                t0: t,
                h: hh,
                y0: y,
                y1,
                r,
            };
            steps += 1;
            t = if at_end { t_end } else { t + hh };
            y = y1;
            let mut projected = y;
            sys.project(&mut projected);
            let flow = on_step(&step);
            if projected != y {
                y = projected;
                k1 = sys.rhs(t, &y);
            } else {
                k1 = k7;
            }
            if flow == Flow::Stop {
                return outcome(t, y, steps, rejected, Termination::Stopped);
            }
            if at_end {
                return outcome(t, y, steps, rejected, Termination::Reached);
            }
            let mut fac = 0.9 * err.max(1e-10).powf(-0.2);
            fac = fac.clamp(0.2, 10.0);
            if last_reject {
                fac = fac.min(1.0);
            }
            h = hs * fac;
            last_reject = false;
        } else {
            rejected += 1;
            h = hs * (0.9 * err.powf(-0.2)).max(0.2);
            last_reject = true;
        }
    }
}
