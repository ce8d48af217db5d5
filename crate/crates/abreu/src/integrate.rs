//! Adaptive integration of the reduced ODE with dense output and events.
//!
//! The stepper is an embedded Dormand-Prince 5(4) pair with the classical
//! quartic dense interpolant and a PI step-size controller. Backward runs
//! toward the origin use a negative step sign through the same code path.
//!
//! Solutions of the reduced equation keep the signs of f and f' constant
//! (for n >= 2; in one dimension the 1/f term is absent and f may cross
//! zero), so the integrator treats approaches to f = 0 and f' = 0 as
//! terminating events rather than data. All events are located by bisection
//! on the dense interpolant to 1e-12 in r:
//!
//! * `ReachedBound`: hit the requested r (or the backward floor 1e-8);
//! * `BlowUp`: |f| or |f'| crossed the blow-up threshold, or the step size
//!   collapsed while |f'| was growing through a movable singularity;
//! * `VanishingF` / `StationaryF`: f or f' entered the zero tolerance band;
//! * `StepCollapse`: step size fell below the floor with no singular
//!   growth, which signals an integration failure rather than a branch
//!   point.

use crate::model::{rhs_second_order, ModelParams, State};
use crate::series::{origin_series_eval, InfinityBehavior, OriginBehavior};
use crate::{linalg, Error, Result};

/// Radial floor for backward runs in n >= 2: the equation is singular at
/// r = 0, so integrations stop here and report `ReachedBound`.
pub const R_FLOOR: f64 = 1e-8;

/// Absolute r-tolerance to which events are located on the dense output.
pub const EVENT_LOCATION_TOL: f64 = 1e-12;

/// Step-size controls and event thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    /// Relative error tolerance per step.
    pub rel_tol: f64,
    /// Absolute error tolerance per step; doubles as the zero band for the
    /// f and f' events.
    pub abs_tol: f64,
    /// Upper bound on the step size (unbounded by default; the error
    /// controller and the remaining interval already limit steps).
    pub max_step: f64,
    /// |f| or |f'| crossing this value terminates with `BlowUp`. Kept at
    /// 1e12 so the last few dozen accepted steps before a singularity stay
    /// well inside double-precision range for branch fitting.
    pub blowup_threshold: f64,
    /// Minimum step as a fraction of the integration interval.
    pub min_step_factor: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
            blowup_threshold: 1e12,
            min_step_factor: 1e-14,
        }
    }
}

/// Why an integration stopped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    /// Reached the requested bound (or the backward floor).
    ReachedBound { r: f64 },
    /// |f| or |f'| blew up; `r_last` is the final accepted sample and
    /// `r_estimate` an extrapolated singularity location bracketing it.
    BlowUp { r_last: f64, r_estimate: f64 },
    /// f entered the zero band (n >= 2 only).
    VanishingF { r: f64 },
    /// f' entered the zero band.
    StationaryF { r: f64 },
    /// Step size collapsed without singular growth in f'.
    StepCollapse { r: f64 },
}

impl Termination {
    /// Radius of the final accepted sample.
    pub fn r(&self) -> f64 {
        match *self {
            Termination::ReachedBound { r }
            | Termination::VanishingF { r }
            | Termination::StationaryF { r }
            | Termination::StepCollapse { r } => r,
            Termination::BlowUp { r_last, .. } => r_last,
        }
    }

    /// True for endings consistent with a movable singularity.
    pub fn is_singular(&self) -> bool {
        matches!(self, Termination::BlowUp { .. } | Termination::StepCollapse { .. })
    }

    /// Short stable name used in tables and sidecars.
    pub fn tag(&self) -> &'static str {
        match self {
            Termination::ReachedBound { .. } => "reached_bound",
            Termination::BlowUp { .. } => "blow_up",
            Termination::VanishingF { .. } => "vanishing_f",
            Termination::StationaryF { .. } => "stationary_f",
            Termination::StepCollapse { .. } => "step_collapse",
        }
    }
}

/// One accepted step's dense-output coefficients (per state component).
#[derive(Debug, Clone, Copy)]
struct DenseStep {
    r_from: f64,
    h: f64,
    cont: [[f64; 5]; 2],
}

impl DenseStep {
    fn value(&self, comp: usize, theta: f64) -> f64 {
        let c = &self.cont[comp];
        c[0] + theta * (c[1] + (1.0 - theta) * (c[2] + theta * (c[3] + (1.0 - theta) * c[4])))
    }

    fn derivative(&self, comp: usize, theta: f64) -> f64 {
        let c = &self.cont[comp];
        let inner3 = c[3] + (1.0 - theta) * c[4];
        let inner2 = c[2] + theta * inner3;
        let inner1 = c[1] + (1.0 - theta) * inner2;
        let d_inner2 = inner3 - theta * c[4];
        let dy_dtheta = inner1 + theta * (-inner2 + (1.0 - theta) * d_inner2);
        dy_dtheta / self.h
    }
}

/// An accepted solution path: samples at step endpoints, dense output in
/// between, and the reason integration stopped.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub params: ModelParams,
    pub samples: Vec<State>,
    pub termination: Termination,
    steps: Vec<DenseStep>,
    zero_tol: f64,
}

impl Trajectory {
    /// Assembles a trajectory from raw samples (no dense output), e.g. data
    /// produced outside this crate. Radii must be strictly monotone; sign
    /// constancy is deliberately not enforced here so that diagnostic checks
    /// can be run against violating data.
    pub fn from_samples(
        params: ModelParams,
        samples: Vec<State>,
        termination: Termination,
    ) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::BadWindow("a trajectory needs at least two samples".into()));
        }
        let dir = (samples[1].r - samples[0].r).signum();
        for w in samples.windows(2) {
            if !((w[1].r - w[0].r) * dir > 0.0) {
                return Err(Error::BadWindow(format!(
                    "sample radii must be strictly monotone ({} then {})",
                    w[0].r, w[1].r
                )));
            }
        }
        Ok(Trajectory { params, samples, termination, steps: Vec::new(), zero_tol: 1e-12 })
    }

    /// +1.0 for forward runs (increasing r), -1.0 for backward.
    pub fn direction(&self) -> f64 {
        (self.samples[self.samples.len() - 1].r - self.samples[0].r).signum()
    }

    pub fn r_start(&self) -> f64 {
        self.samples[0].r
    }

    pub fn r_end(&self) -> f64 {
        self.samples[self.samples.len() - 1].r
    }

    /// Zero band used for the sign events when this trajectory was built.
    pub fn zero_tol(&self) -> f64 {
        self.zero_tol
    }

    fn locate(&self, r: f64) -> Result<(&DenseStep, f64)> {
        if self.steps.is_empty() {
            return Err(Error::IntegrationFailure(
                "trajectory has no dense output (assembled from raw samples)".into(),
            ));
        }
        let (lo, hi) = (self.r_start().min(self.r_end()), self.r_start().max(self.r_end()));
        let slack = 1e-12 * (1.0 + hi.abs());
        if r < lo - slack || r > hi + slack {
            return Err(Error::OutOfDomain { r, lo, hi });
        }
        let dir = self.direction();
        let idx = self
            .steps
            .partition_point(|s| dir * (s.r_from + s.h) < dir * r)
            .min(self.steps.len() - 1);
        let step = &self.steps[idx];
        let theta = ((r - step.r_from) / step.h).clamp(0.0, 1.0);
        Ok((step, theta))
    }

    /// (f, f') interpolated at radius r inside the trajectory domain.
    pub fn eval(&self, r: f64) -> Result<(f64, f64)> {
        let (step, theta) = self.locate(r)?;
        Ok((step.value(0, theta), step.value(1, theta)))
    }

    /// (f, f', f'') with f'' the exact derivative of the interpolated f'.
    pub fn eval2(&self, r: f64) -> Result<(f64, f64, f64)> {
        let (step, theta) = self.locate(r)?;
        Ok((step.value(0, theta), step.value(1, theta), step.derivative(1, theta)))
    }

    /// Integral of f from a to b by 4-point Gauss-Legendre quadrature on
    /// each dense polynomial piece (exact for the quartic interpolant).
    pub fn integral_of_f(&self, a: f64, b: f64) -> Result<f64> {
        const GL_X: [f64; 4] =
            [-0.8611363115940526, -0.33998104358485626, 0.33998104358485626, 0.8611363115940526];
        const GL_W: [f64; 4] =
            [0.34785484513745385, 0.6521451548625461, 0.6521451548625461, 0.34785484513745385];
        self.locate(a)?;
        self.locate(b)?;
        let (lo, hi) = (a.min(b), a.max(b));
        let mut total = 0.0;
        for step in &self.steps {
            let (s_lo, s_hi) = if step.h > 0.0 {
                (step.r_from, step.r_from + step.h)
            } else {
                (step.r_from + step.h, step.r_from)
            };
            let seg_lo = s_lo.max(lo);
            let seg_hi = s_hi.min(hi);
            if seg_lo >= seg_hi {
                continue;
            }
            let mid = 0.5 * (seg_lo + seg_hi);
            let half = 0.5 * (seg_hi - seg_lo);
            for (x, w) in GL_X.iter().zip(GL_W) {
                let r = mid + half * x;
                let theta = ((r - step.r_from) / step.h).clamp(0.0, 1.0);
                total += w * half * step.value(0, theta);
            }
        }
        Ok(if a <= b { total } else { -total })
    }
}

// Dormand-Prince 5(4) tableau.
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

// Difference between the 5th- and 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// Dense-output weights for the fifth contribution vector.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

// PI controller constants (Hairer-Norsett-Wanner defaults for DOPRI5).
const SAFE: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;
// h_new = h / fac with fac clamped to [FAC_MIN, FAC_MAX]: growth is capped
// at 10x per step and shrinkage at 5x.
const FAC_MIN: f64 = 0.1;
const FAC_MAX: f64 = 5.0;

const MAX_STEPS: usize = 1_000_000;

type Vec2 = [f64; 2];

fn rhs_system(p: &ModelParams, r: f64, y: &Vec2) -> Result<Vec2> {
    let fpp = rhs_second_order(p, &State::new(r, y[0], y[1]))?;
    Ok([y[1], fpp])
}

/// Integrates from `init` to `r_target`. Backward targets in n >= 2 are
/// clamped to the floor 1e-8; reaching the floor without an event reports
/// `ReachedBound` there.
pub fn integrate(
    p: &ModelParams,
    init: State,
    r_target: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    validate_config(cfg)?;
    p.check_state(&init)?;
    if !r_target.is_finite() {
        return Err(Error::BadInitialState(format!("non-finite target radius {r_target}")));
    }
    if r_target == init.r {
        return Err(Error::BadInitialState("target radius equals the initial radius".into()));
    }
    let backward = r_target < init.r;
    if backward && p.n >= 2 && r_target < 0.0 {
        return Err(Error::BadInitialState(format!(
            "backward target must be >= 0 for n >= 2, got {r_target}"
        )));
    }
    let target = if backward && p.n >= 2 { r_target.max(R_FLOOR) } else { r_target };
    if backward && p.n >= 2 && init.r <= target {
        return Err(Error::BadInitialState(format!(
            "backward start {} already at or below the floor {target}",
            init.r
        )));
    }

    if init.f.abs() <= cfg.abs_tol && p.n >= 2 {
        return Err(Error::BadInitialState("initial f lies inside the zero band".into()));
    }
    if init.fp.abs() <= cfg.abs_tol {
        return Err(Error::BadInitialState(
            "initial f' lies inside the zero band (only the constant solution starts there)".into(),
        ));
    }
    if init.f.abs() >= cfg.blowup_threshold || init.fp.abs() >= cfg.blowup_threshold {
        return Err(Error::BadInitialState("initial state exceeds the blow-up threshold".into()));
    }

    let dir = if backward { -1.0 } else { 1.0 };
    let interval = (target - init.r).abs();
    let h_min = cfg.min_step_factor * interval;
    let f_sign = init.f.signum();
    let fp_sign = init.fp.signum();

    let mut r = init.r;
    let mut y: Vec2 = [init.f, init.fp];
    let mut k1 = rhs_system(p, r, &y)?;
    let mut h = dir * initial_step(p, &init, interval, cfg);
    let mut facold: f64 = 1e-4;
    let mut rejected = false;

    let mut traj = Trajectory {
        params: *p,
        samples: vec![init],
        termination: Termination::ReachedBound { r: target },
        steps: Vec::new(),
        zero_tol: cfg.abs_tol,
    };

    for _ in 0..MAX_STEPS {
        let remaining = target - r;
        if remaining.abs() <= 1e-14 * (1.0 + target.abs()) {
            traj.termination = Termination::ReachedBound { r: target };
            return Ok(traj);
        }
        let mut landing = false;
        if h.abs() >= remaining.abs() {
            h = remaining;
            landing = true;
        }
        if h.abs() < h_min && !landing {
            traj.termination = collapse_termination(&traj, r, h);
            return Ok(traj);
        }

        let stages = match dp_stages(p, r, &y, &k1, h, cfg) {
            Ok(st) => st,
            Err(_) => {
                h *= 0.5;
                rejected = true;
                continue;
            }
        };
        let (y1, k, err) = stages;
        if !err.is_finite() || err > 1.0 {
            let fac11 = if err.is_finite() { err.powf(EXPO1) } else { FAC_MAX * SAFE };
            h /= (fac11 / SAFE).min(FAC_MAX);
            rejected = true;
            continue;
        }

        let dense = make_dense(r, h, &y, &y1, &k);

        // Events, checked on the new endpoint and located by bisection on
        // the dense interpolant. Sign events trigger on actual flips, not
        // on small magnitudes: regular origin approaches have f' -> 0 (and
        // the vanishing profile f -> 0) without ever crossing, and those
        // runs must continue to the floor. Earliest trigger along the step
        // wins.
        let mut event: Option<(f64, EventKind)> = None;
        let mut consider = |theta: f64, kind: EventKind| match event {
            Some((t, _)) if t <= theta => {}
            _ => event = Some((theta, kind)),
        };
        if y1[0].abs() >= cfg.blowup_threshold || y1[1].abs() >= cfg.blowup_threshold {
            let theta = bisect_event(&dense, |f, fp| {
                f.abs() >= cfg.blowup_threshold || fp.abs() >= cfg.blowup_threshold
            });
            consider(theta, EventKind::BlowUp);
        }
        if p.n >= 2 && y1[0].signum() != f_sign {
            let theta = bisect_event(&dense, |f, _| f.signum() != f_sign);
            consider(theta, EventKind::VanishingF);
        }
        if y1[1].signum() != fp_sign {
            let theta = bisect_event(&dense, |_, fp| fp.signum() != fp_sign);
            consider(theta, EventKind::StationaryF);
        }

        if let Some((theta, kind)) = event {
            let r_ev = r + theta * h;
            let state = State::new(r_ev, dense.value(0, theta), dense.value(1, theta));
            traj.steps.push(dense);
            traj.samples.push(state);
            traj.termination = match kind {
                EventKind::BlowUp => {
                    Termination::BlowUp { r_last: r_ev, r_estimate: estimate_rstar(&traj, r_ev, h) }
                }
                EventKind::VanishingF => Termination::VanishingF { r: r_ev },
                EventKind::StationaryF => Termination::StationaryF { r: r_ev },
            };
            return Ok(traj);
        }

        let r_new = if landing { target } else { r + h };
        traj.steps.push(dense);
        traj.samples.push(State::new(r_new, y1[0], y1[1]));
        if landing {
            traj.termination = Termination::ReachedBound { r: target };
            return Ok(traj);
        }

        // PI step-size update.
        let fac11 = err.powf(EXPO1);
        let fac = (fac11 / facold.powf(BETA) / SAFE).clamp(FAC_MIN, FAC_MAX);
        let mut h_new = h / fac;
        if h_new.abs() > cfg.max_step {
            h_new = dir * cfg.max_step;
        }
        if rejected {
            h_new = dir * h_new.abs().min(h.abs());
        }
        facold = err.max(1e-4);
        rejected = false;
        r = r_new;
        y = y1;
        k1 = k[6];
        h = h_new;
    }
    Err(Error::IntegrationFailure(format!(
        "step budget of {MAX_STEPS} exhausted before reaching {target}"
    )))
}

enum EventKind {
    BlowUp,
    VanishingF,
    StationaryF,
}

fn validate_config(cfg: &IntegratorConfig) -> Result<()> {
    if !(cfg.rel_tol > 0.0 && cfg.abs_tol > 0.0) {
        return Err(Error::InvalidParams("tolerances must be positive".into()));
    }
    if !(cfg.blowup_threshold > 0.0 && cfg.min_step_factor > 0.0 && cfg.max_step > 0.0) {
        return Err(Error::InvalidParams(
            "blow-up threshold, min step factor, and max step must be positive".into(),
        ));
    }
    Ok(())
}

fn initial_step(p: &ModelParams, init: &State, interval: f64, cfg: &IntegratorConfig) -> f64 {
    let mut h = 1e-4 * interval;
    if init.fp != 0.0 {
        h = h.min(1e-2 * (init.f / init.fp).abs().max(1e-12));
    }
    if let Ok(fpp) = rhs_second_order(p, init) {
        if fpp != 0.0 {
            h = h.min(1e-2 * (init.fp / fpp).abs().max(1e-12));
        }
    }
    h.min(cfg.max_step).max(1e-300)
}

/// Runs the seven Dormand-Prince stages; returns the 5th-order endpoint, all
/// stage derivatives, and the tolerance-scaled error norm (accept iff <= 1).
#[allow(clippy::type_complexity)]
fn dp_stages(
    p: &ModelParams,
    r: f64,
    y: &Vec2,
    k1: &Vec2,
    h: f64,
    cfg: &IntegratorConfig,
) -> Result<(Vec2, [Vec2; 7], f64)> {
    let lift = |coeffs: &[(f64, Vec2)]| -> Vec2 {
        let mut out = *y;
        for (c, k) in coeffs {
            out[0] += h * c * k[0];
            out[1] += h * c * k[1];
        }
        out
    };
    let k1 = *k1;
    let k2 = rhs_system(p, r + C2 * h, &lift(&[(A21, k1)]))?;
    let k3 = rhs_system(p, r + C3 * h, &lift(&[(A31, k1), (A32, k2)]))?;
    let k4 = rhs_system(p, r + C4 * h, &lift(&[(A41, k1), (A42, k2), (A43, k3)]))?;
    let k5 = rhs_system(p, r + C5 * h, &lift(&[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]))?;
    let k6 = rhs_system(p, r + h, &lift(&[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)]))?;
    let y1 = lift(&[(A71, k1), (A73, k3), (A74, k4), (A75, k5), (A76, k6)]);
    let k7 = rhs_system(p, r + h, &y1)?;

    // RMS error over the two components, scaled by the mixed tolerance.
    let mut acc = 0.0;
    for i in 0..2 {
        let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let sc = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y1[i].abs());
        acc += (e / sc) * (e / sc);
    }
    Ok((y1, [k1, k2, k3, k4, k5, k6, k7], (acc / 2.0).sqrt()))
}

fn make_dense(r: f64, h: f64, y: &Vec2, y1: &Vec2, k: &[Vec2; 7]) -> DenseStep {
    let mut cont = [[0.0; 5]; 2];
    for i in 0..2 {
        let ydiff = y1[i] - y[i];
        let bspl = h * k[0][i] - ydiff;
        cont[i][0] = y[i];
        cont[i][1] = ydiff;
        cont[i][2] = bspl;
        cont[i][3] = ydiff - h * k[6][i] - bspl;
        cont[i][4] = h
            * (D1 * k[0][i]
                + D3 * k[2][i]
                + D4 * k[3][i]
                + D5 * k[4][i]
                + D6 * k[5][i]
                + D7 * k[6][i]);
    }
    DenseStep { r_from: r, h, cont }
}

/// Earliest theta in (0, 1] where `triggered` holds, located by bisection to
/// EVENT_LOCATION_TOL in r. The step endpoint is known to trigger.
fn bisect_event(dense: &DenseStep, triggered: impl Fn(f64, f64) -> bool) -> f64 {
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    if triggered(dense.value(0, 0.0), dense.value(1, 0.0)) {
        return 0.0;
    }
    while (hi - lo) * dense.h.abs() > EVENT_LOCATION_TOL {
        let mid = 0.5 * (lo + hi);
        if triggered(dense.value(0, mid), dense.value(1, mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Distinguishes a genuine step collapse from a movable singularity. A
/// controller tracking a branch point shrinks h in proportion to the
/// remaining distance, so per-step growth of |f'| stays small; the reliable
/// signature is cumulative. The collapse is reported as a blow-up, with an
/// extrapolated location, when |f'| has climbed at least three orders of
/// magnitude above its starting value and is still growing monotonically.
fn collapse_termination(traj: &Trajectory, r: f64, h: f64) -> Termination {
    let tail = &traj.samples[traj.samples.len().saturating_sub(5)..];
    if tail.len() >= 3 {
        let start = traj.samples[0].fp.abs();
        let last = tail[tail.len() - 1].fp.abs();
        let growing = tail.windows(2).all(|w| w[1].fp.abs() >= w[0].fp.abs());
        if growing && last >= 1e3 * start.max(1.0) {
            return Termination::BlowUp { r_last: r, r_estimate: estimate_rstar(traj, r, h) };
        }
    }
    Termination::StepCollapse { r }
}

/// Geometric extrapolation of the singularity location from the last two
/// accepted step sizes. Only an estimate: classification refines it.
fn estimate_rstar(traj: &Trajectory, r: f64, h: f64) -> f64 {
    let n = traj.samples.len();
    let fallback = r + h.signum() * h.abs();
    if n < 3 {
        return fallback;
    }
    let h_last = (traj.samples[n - 1].r - traj.samples[n - 2].r).abs();
    let h_prev = (traj.samples[n - 2].r - traj.samples[n - 3].r).abs();
    if h_last <= 0.0 || h_prev <= 0.0 {
        return fallback;
    }
    let q = (h_last / h_prev).min(0.95);
    r + h.signum() * (h_last * q / (1.0 - q)).min(10.0 * h_last).max(h_last * 1e-3)
}

/// Builds the initial state at radius `epsilon` from an origin expansion.
/// Rejects seeds whose f or f' vanish (those start the constant solution or
/// sit on the f = 0 singular set).
pub fn seed_from_origin(p: &ModelParams, b: &OriginBehavior, epsilon: f64) -> Result<State> {
    if epsilon <= 0.0 {
        return Err(Error::NonPositiveRadius { r: epsilon });
    }
    let (f, fp) = origin_series_eval(p, b, epsilon)?;
    if fp == 0.0 {
        return Err(Error::BadInitialState(
            "seed has f' = 0: the expansion degenerates to the constant solution".into(),
        ));
    }
    if f == 0.0 && p.n >= 2 {
        return Err(Error::BadInitialState("seed lands exactly on f = 0".into()));
    }
    Ok(State::new(epsilon, f, fp))
}

/// Result of asymptote detection at large r: the identified behaviour, the
/// fitted 1/r coefficient b, its relative deviation from the predicted
/// coefficient (n(n+1)/kappa or 2n^2/kappa), and the normalized fit
/// residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoteFit {
    pub behavior: InfinityBehavior,
    pub b: f64,
    pub b_law_deviation: f64,
    pub residual: f64,
}

/// Normalized fit residual above which no asymptote is reported.
const ASYMPTOTE_FIT_REJECT: f64 = 1e-3;

/// |f_inf| below which the fit is read as the decaying solution.
const ASYMPTOTE_CONST_THRESHOLD: f64 = 1e-6;

/// Fits f ~ c + b/r on the last decade of a forward trajectory that reached
/// a large bound (r_end >= 50/kappa). Returns None when the trajectory does
/// not qualify or the fit residual exceeds 1e-3.
pub fn detect_asymptote(traj: &Trajectory) -> Option<AsymptoteFit> {
    let p = &traj.params;
    if traj.direction() < 0.0 || !matches!(traj.termination, Termination::ReachedBound { .. }) {
        return None;
    }
    let r_end = traj.r_end();
    let min_reach = if p.kappa > 0.0 { 50.0 / p.kappa } else { 50.0 };
    if r_end < min_reach || traj.r_start() <= 0.0 {
        return None;
    }
    let r_lo = (r_end / 10.0).max(traj.r_start());
    let count = 64;
    let mut rs = Vec::with_capacity(count);
    let mut fs = Vec::with_capacity(count);
    for i in 0..count {
        let t = i as f64 / (count - 1) as f64;
        let r = r_lo * (r_end / r_lo).powf(t);
        let (f, _) = traj.eval(r).ok()?;
        rs.push(r);
        fs.push(f);
    }
    let inv_r: Vec<f64> = rs.iter().map(|r| 1.0 / r).collect();
    let ones = vec![1.0; rs.len()];
    let coeffs = linalg::least_squares(&[&ones, &inv_r], &fs).ok()?;
    let (c, b) = (coeffs[0], coeffs[1]);
    let misfit: Vec<f64> = rs.iter().zip(&fs).map(|(r, f)| f - (c + b / r)).collect();
    let scale = fs.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1e-300);
    let residual = linalg::rms(&misfit) / scale;
    if residual > ASYMPTOTE_FIT_REJECT {
        return None;
    }
    let behavior = if c.abs() > ASYMPTOTE_CONST_THRESHOLD {
        InfinityBehavior::ConstAsymptote { f_inf: c }
    } else {
        InfinityBehavior::DecayAsymptote
    };
    let law = behavior.correction_coefficient(p);
    let b_law_deviation = if law != 0.0 { (b - law).abs() / law.abs() } else { f64::INFINITY };
    Some(AsymptoteFit { behavior, b, b_law_deviation, residual })
}
