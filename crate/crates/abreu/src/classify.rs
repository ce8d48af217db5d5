//! Joint classification of solutions by initial quadrant and end behaviour.
//!
//! For kappa > 0 and lambda != 0 the signs of (f, f') at small radius are
//! invariants of the flow and split solutions into four cases:
//!
//! * case i: f > 0, f' > 0;  * case ii: f < 0, f' > 0;
//! * case iii: f > 0, f' < 0;  * case iv: f < 0, f' < 0.
//!
//! Each case permits a fixed menu of behaviours. Forward in r: case i ends
//! in a logarithmic branch point with chat < 0; case ii in an algebraic one
//! with c0 < 0; case iii decays, tends to a positive constant, or ends in an
//! algebraic branch point with c0 > 0; case iv tends to a negative constant
//! or ends in a logarithmic branch point with chat > 0. Backward toward the
//! origin: case i reaches a positive regular limit (growing), the vanishing
//! profile (lambda < 0), or an algebraic branch point with c0 > 0; cases ii
//! and iii mirror with signs flipped and logarithmic branch points; case iv
//! is the negative counterpart of case i. [`classify_forward`] and
//! [`classify_backward`] integrate, identify the end behaviour, and report
//! whether it sits inside the permitted menu ([`Membership`]).
//!
//! [`scan`] runs both directions over a grid of initial values, recording
//! per-point failures as data rather than aborting, in parallel when the
//! `parallel` feature is enabled.

use crate::integrate::{
    detect_asymptote, integrate, AsymptoteFit, IntegratorConfig, Termination, Trajectory,
};
use crate::model::{ModelParams, State};
use crate::par;
use crate::series::{fit_origin_behavior, BranchKind, OriginBehavior, OriginFit};
use crate::singularity::{classify_branch, SingularityReport};
use crate::{Error, Result};

/// A backward run ending below this fraction of the origin-fit window top is
/// treated as having reached the origin, with the terminal boundary layer
/// (where seed truncation dominates) excluded from the fit.
const ORIGIN_ZONE: f64 = 0.1;

/// Initial-quadrant case in the (f, f') plane at small radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TheoremCase {
    I,
    II,
    III,
    IV,
}

impl TheoremCase {
    /// Case from the signs of f and f' at the anchor radius. States on the
    /// coordinate axes belong to no case.
    pub fn from_signs(f: f64, fp: f64) -> Result<Self> {
        if f == 0.0 || fp == 0.0 || !f.is_finite() || !fp.is_finite() {
            return Err(Error::BadInitialState(format!(
                "(f, f') = ({f}, {fp}) lies on a coordinate axis and belongs to no case"
            )));
        }
        Ok(match (f > 0.0, fp > 0.0) {
            (true, true) => TheoremCase::I,
            (false, true) => TheoremCase::II,
            (true, false) => TheoremCase::III,
            (false, false) => TheoremCase::IV,
        })
    }

    pub fn label(&self) -> &'static str {
        match self {
            TheoremCase::I => "i",
            TheoremCase::II => "ii",
            TheoremCase::III => "iii",
            TheoremCase::IV => "iv",
        }
    }
}

/// End behaviour of a forward run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ForwardOutcome {
    /// Finite-radius singularity.
    Branch(SingularityReport),
    /// Run reached the horizon and matched an infinity expansion.
    Asymptote(AsymptoteFit),
}

impl ForwardOutcome {
    pub fn tag(&self) -> &'static str {
        match self {
            ForwardOutcome::Branch(rep) => rep.kind.tag(),
            ForwardOutcome::Asymptote(fit) => fit.behavior.tag(),
        }
    }

    /// Branch location, when the outcome is a branch point.
    pub fn location(&self) -> Option<f64> {
        match self {
            ForwardOutcome::Branch(rep) => Some(rep.kind.r0()),
            ForwardOutcome::Asymptote(_) => None,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ForwardOutcome::Branch(rep) => match rep.kind {
                BranchKind::Algebraic { r0, c0 } => {
                    format!("algebraic branch point at r0 = {r0:.6} with c0 = {c0:.6}")
                }
                BranchKind::Logarithmic { r0 } => format!(
                    "logarithmic branch point at r0 = {r0:.6} with chat = {:.6}",
                    rep.chat.unwrap_or(f64::NAN)
                ),
            },
            ForwardOutcome::Asymptote(fit) => match fit.behavior {
                crate::series::InfinityBehavior::ConstAsymptote { f_inf } => {
                    format!("constant asymptote f_inf = {f_inf:.6}")
                }
                crate::series::InfinityBehavior::DecayAsymptote => "decaying asymptote".into(),
            },
        }
    }
}

/// End behaviour of a backward run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BackwardOutcome {
    /// Movable singularity between the anchor and the origin.
    Branch(SingularityReport),
    /// Run reached the origin region and matched an origin expansion.
    Origin(OriginFit),
}

impl BackwardOutcome {
    pub fn tag(&self) -> &'static str {
        match self {
            BackwardOutcome::Branch(rep) => rep.kind.tag(),
            BackwardOutcome::Origin(fit) => fit.behavior.tag(),
        }
    }

    pub fn location(&self) -> Option<f64> {
        match self {
            BackwardOutcome::Branch(rep) => Some(rep.kind.r0()),
            BackwardOutcome::Origin(_) => None,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            BackwardOutcome::Branch(rep) => match rep.kind {
                BranchKind::Algebraic { r0, c0 } => {
                    format!("algebraic branch point at r0 = {r0:.6} with c0 = {c0:.6}")
                }
                BranchKind::Logarithmic { r0 } => format!(
                    "logarithmic branch point at r0 = {r0:.6} with chat = {:.6}",
                    rep.chat.unwrap_or(f64::NAN)
                ),
            },
            BackwardOutcome::Origin(fit) => match fit.behavior {
                OriginBehavior::RegularA { f0, a } => {
                    format!("regular origin limit f0 = {f0:.6} with growth a = {a:.6}")
                }
                OriginBehavior::RegularB { f0 } => {
                    format!("regular origin limit f0 = {f0:.6} along the rigid profile")
                }
                OriginBehavior::Vanishing => "vanishing origin profile".into(),
                OriginBehavior::ExactPole => "exact pole profile".into(),
            },
        }
    }
}

/// Whether an observed outcome sits inside the permitted menu for its case.
#[derive(Debug, Clone, PartialEq)]
pub enum Membership {
    Holds,
    Violated(String),
    /// The case menus assume kappa > 0 and lambda != 0.
    NotApplicable,
}

impl Membership {
    pub fn tag(&self) -> &'static str {
        match self {
            Membership::Holds => "holds",
            Membership::Violated(_) => "violated",
            Membership::NotApplicable => "not-applicable",
        }
    }
}

/// A classified forward run.
#[derive(Debug, Clone)]
pub struct ForwardClassification {
    pub case: TheoremCase,
    pub outcome: ForwardOutcome,
    pub membership: Membership,
    pub termination: Termination,
}

/// A classified backward run.
#[derive(Debug, Clone)]
pub struct BackwardClassification {
    pub case: TheoremCase,
    pub outcome: BackwardOutcome,
    pub membership: Membership,
    pub termination: Termination,
}

/// Forward integration horizon: far enough past 50/kappa that asymptote
/// detection has a clean final decade.
pub fn forward_horizon(p: &ModelParams) -> f64 {
    if p.kappa > 0.0 {
        1e3_f64.max(1e3 / p.kappa)
    } else {
        1e3
    }
}

/// Integrates forward from `init` to the horizon and identifies the end
/// behaviour: a branch point (on blow-up or singular step collapse) or an
/// asymptote (on reaching the horizon).
pub fn classify_forward(
    p: &ModelParams,
    init: State,
    cfg: &IntegratorConfig,
) -> Result<ForwardClassification> {
    let case = TheoremCase::from_signs(init.f, init.fp)?;
    let traj = integrate(p, init, forward_horizon(p), cfg)?;
    let termination = traj.termination;
    let outcome = match termination {
        Termination::BlowUp { .. } | Termination::StepCollapse { .. } => {
            ForwardOutcome::Branch(classify_branch(&traj)?)
        }
        Termination::ReachedBound { .. } => match detect_asymptote(&traj) {
            Some(fit) => ForwardOutcome::Asymptote(fit),
            None => {
                return Err(Error::Inconclusive(format!(
                    "run reached r = {:.3e} but matched no infinity expansion",
                    traj.r_end()
                )))
            }
        },
        Termination::VanishingF { r } | Termination::StationaryF { r } => {
            return Err(Error::Inconclusive(format!(
                "forward run entered the zero band at r = {r:.6e}, which the sign lemma \
                 forbids for exact solutions; integration accuracy is exhausted"
            )))
        }
    };
    let membership = forward_menu_permits(p, case, &outcome);
    Ok(ForwardClassification { case, outcome, membership, termination })
}

/// Integrates backward from `init` toward the origin and identifies the end
/// behaviour: a branch point, or an origin expansion fitted on a trailing
/// window of the trajectory.
pub fn classify_backward(
    p: &ModelParams,
    init: State,
    cfg: &IntegratorConfig,
) -> Result<BackwardClassification> {
    let case = TheoremCase::from_signs(init.f, init.fp)?;
    let traj = integrate(p, init, 0.0, cfg)?;
    let termination = traj.termination;
    // A termination deep inside the prospective fitting window is treated as
    // part of the origin approach: seeding and integration errors put the
    // trajectory on a neighbour of the intended solution, and a neighbour's
    // f can reach zero at a radius far below the resolved scales even when
    // the intended solution's does not. The expansions are then fitted on
    // the clean decades above that point, falling back to branch
    // classification if none of them accounts for the data.
    let r_hi = (0.95 * traj.r_start()).min(0.1);
    let near_origin = traj.r_end() < ORIGIN_ZONE * r_hi;
    let outcome = match termination {
        Termination::BlowUp { .. } | Termination::StepCollapse { .. } => {
            let origin = if near_origin { fit_origin_tail(p, &traj).ok() } else { None };
            match origin {
                Some(fit) => BackwardOutcome::Origin(fit),
                None => BackwardOutcome::Branch(classify_branch(&traj)?),
            }
        }
        Termination::ReachedBound { .. } => BackwardOutcome::Origin(fit_origin_tail(p, &traj)?),
        Termination::VanishingF { r } | Termination::StationaryF { r } => {
            if near_origin {
                BackwardOutcome::Origin(fit_origin_tail(p, &traj)?)
            } else {
                return Err(Error::Inconclusive(format!(
                    "backward run ended with {} at r = {r:.6e}, too far out to fit an origin \
                     expansion; the sign lemma forbids such a crossing for exact solutions, \
                     so integration accuracy is exhausted",
                    termination.tag()
                )));
            }
        }
    };
    let membership = backward_menu_permits(p, case, &outcome);
    Ok(BackwardClassification { case, outcome, membership, termination })
}

/// Runs both directions from one anchor state.
pub fn classify_both(
    p: &ModelParams,
    init: State,
    cfg: &IntegratorConfig,
) -> (Result<ForwardClassification>, Result<BackwardClassification>) {
    (classify_forward(p, init, cfg), classify_backward(p, init, cfg))
}

/// Resamples the trailing decades of a backward trajectory and fits the
/// origin expansions over them.
fn fit_origin_tail(p: &ModelParams, traj: &Trajectory) -> Result<OriginFit> {
    let r_hi = (0.95 * traj.r_start()).min(0.1);
    let r_lo = (1.02 * traj.r_end()).max(r_hi * 1e-4).max(1e-7);
    if r_lo >= r_hi {
        return Err(Error::BadWindow(format!(
            "no usable origin window: trajectory covers [{:.3e}, {:.3e}]",
            traj.r_end(),
            traj.r_start()
        )));
    }
    let count = 64;
    let mut samples = Vec::with_capacity(count);
    for i in 0..count {
        let t = i as f64 / (count - 1) as f64;
        let r = r_lo * (r_hi / r_lo).powf(t);
        let (f, fp) = traj.eval(r)?;
        samples.push(State::new(r, f, fp));
    }
    fit_origin_behavior(p, &samples)
}

fn menus_apply(p: &ModelParams) -> bool {
    p.kappa > 0.0 && p.lambda != 0.0
}

/// Permitted forward behaviours per case (kappa > 0, lambda != 0).
pub fn forward_menu_permits(
    p: &ModelParams,
    case: TheoremCase,
    outcome: &ForwardOutcome,
) -> Membership {
    if !menus_apply(p) {
        return Membership::NotApplicable;
    }
    let ok = match (case, outcome) {
        (TheoremCase::I, ForwardOutcome::Branch(rep)) => is_log_with_sign(rep, -1.0),
        (TheoremCase::II, ForwardOutcome::Branch(rep)) => is_alg_with_sign(rep, -1.0),
        (TheoremCase::III, ForwardOutcome::Branch(rep)) => is_alg_with_sign(rep, 1.0),
        (TheoremCase::III, ForwardOutcome::Asymptote(fit)) => match fit.behavior {
            crate::series::InfinityBehavior::ConstAsymptote { f_inf } => f_inf > 0.0,
            crate::series::InfinityBehavior::DecayAsymptote => true,
        },
        (TheoremCase::IV, ForwardOutcome::Branch(rep)) => is_log_with_sign(rep, 1.0),
        (TheoremCase::IV, ForwardOutcome::Asymptote(fit)) => match fit.behavior {
            crate::series::InfinityBehavior::ConstAsymptote { f_inf } => f_inf < 0.0,
            crate::series::InfinityBehavior::DecayAsymptote => false,
        },
        _ => false,
    };
    if ok {
        Membership::Holds
    } else {
        Membership::Violated(format!(
            "forward case {} does not permit: {}",
            case.label(),
            outcome.describe()
        ))
    }
}

/// Permitted backward behaviours per case (kappa > 0, lambda != 0).
pub fn backward_menu_permits(
    p: &ModelParams,
    case: TheoremCase,
    outcome: &BackwardOutcome,
) -> Membership {
    if !menus_apply(p) {
        return Membership::NotApplicable;
    }
    let lambda = p.lambda;
    let ok = match (case, outcome) {
        (TheoremCase::I, BackwardOutcome::Branch(rep)) => is_alg_with_sign(rep, 1.0),
        (TheoremCase::I, BackwardOutcome::Origin(fit)) => match fit.behavior {
            OriginBehavior::RegularA { f0, a } => f0 > 0.0 && a > 0.0,
            OriginBehavior::RegularB { f0 } => f0 > 0.0 && lambda > 0.0,
            OriginBehavior::Vanishing => lambda < 0.0,
            OriginBehavior::ExactPole => false,
        },
        (TheoremCase::II, BackwardOutcome::Branch(rep)) => is_log_with_sign(rep, 1.0),
        (TheoremCase::II, BackwardOutcome::Origin(fit)) => match fit.behavior {
            OriginBehavior::RegularA { f0, a } => f0 < 0.0 && a > 0.0,
            OriginBehavior::RegularB { f0 } => f0 < 0.0 && lambda > 0.0,
            _ => false,
        },
        (TheoremCase::III, BackwardOutcome::Branch(rep)) => is_log_with_sign(rep, -1.0),
        (TheoremCase::III, BackwardOutcome::Origin(fit)) => match fit.behavior {
            OriginBehavior::RegularA { f0, a } => f0 > 0.0 && a < 0.0,
            OriginBehavior::RegularB { f0 } => f0 > 0.0 && lambda < 0.0,
            _ => false,
        },
        (TheoremCase::IV, BackwardOutcome::Branch(rep)) => is_alg_with_sign(rep, -1.0),
        (TheoremCase::IV, BackwardOutcome::Origin(fit)) => match fit.behavior {
            OriginBehavior::RegularA { f0, a } => f0 < 0.0 && a < 0.0,
            OriginBehavior::RegularB { f0 } => f0 < 0.0 && lambda < 0.0,
            OriginBehavior::Vanishing => lambda > 0.0,
            OriginBehavior::ExactPole => false,
        },
    };
    if ok {
        Membership::Holds
    } else {
        Membership::Violated(format!(
            "backward case {} does not permit: {}",
            case.label(),
            outcome.describe()
        ))
    }
}

fn is_alg_with_sign(rep: &SingularityReport, sign: f64) -> bool {
    matches!(rep.kind, BranchKind::Algebraic { c0, .. } if c0 * sign > 0.0)
}

fn is_log_with_sign(rep: &SingularityReport, sign: f64) -> bool {
    matches!(rep.kind, BranchKind::Logarithmic { .. })
        && rep.chat.map(|c| c * sign > 0.0).unwrap_or(false)
}

/// Result of the sign-constancy check along a trajectory. Samples inside
/// the zero band are neutral; the f check applies only for n >= 2.
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaCheck {
    pub ok: bool,
    pub detail: Option<String>,
}

/// Verifies that sign(f') (always) and sign(f) (n >= 2) never change along
/// the sampled trajectory.
pub fn check_lemma(traj: &Trajectory) -> LemmaCheck {
    let tol = traj.zero_tol();
    let check_f = traj.params.n >= 2;
    let mut f_sign: Option<f64> = None;
    let mut fp_sign: Option<f64> = None;
    for s in &traj.samples {
        if check_f && s.f.abs() > tol {
            match f_sign {
                None => f_sign = Some(s.f.signum()),
                Some(sg) if s.f.signum() != sg => {
                    return LemmaCheck {
                        ok: false,
                        detail: Some(format!("f changed sign at r = {:.6e}", s.r)),
                    }
                }
                _ => {}
            }
        }
        if s.fp.abs() > tol {
            match fp_sign {
                None => fp_sign = Some(s.fp.signum()),
                Some(sg) if s.fp.signum() != sg => {
                    return LemmaCheck {
                        ok: false,
                        detail: Some(format!("f' changed sign at r = {:.6e}", s.r)),
                    }
                }
                _ => {}
            }
        }
    }
    LemmaCheck { ok: true, detail: None }
}

/// Grid of anchor values in the (f, f') plane, all at one anchor radius.
#[derive(Debug, Clone)]
pub struct ScanGrid {
    pub f_values: Vec<f64>,
    pub fp_values: Vec<f64>,
    pub epsilon: f64,
}

impl ScanGrid {
    pub fn new(f_values: Vec<f64>, fp_values: Vec<f64>, epsilon: f64) -> Result<Self> {
        if epsilon <= 0.0 || !epsilon.is_finite() {
            return Err(Error::NonPositiveRadius { r: epsilon });
        }
        if f_values.is_empty() || fp_values.is_empty() {
            return Err(Error::InvalidParams("scan grid must not be empty".into()));
        }
        Ok(ScanGrid { f_values, fp_values, epsilon })
    }

    /// Uniform inclusive grid over [lo, hi] on both axes.
    pub fn square(lo: f64, hi: f64, steps: usize, epsilon: f64) -> Result<Self> {
        if steps < 2 || !(hi > lo) {
            return Err(Error::InvalidParams(format!(
                "square grid needs hi > lo and steps >= 2, got [{lo}, {hi}] with {steps}"
            )));
        }
        let values: Vec<f64> =
            (0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect();
        Self::new(values.clone(), values, epsilon)
    }
}

/// One grid point's results; failures are recorded as strings so a scan
/// always completes.
#[derive(Debug, Clone)]
pub struct ScanEntry {
    pub f_eps: f64,
    pub fp_eps: f64,
    pub forward: std::result::Result<ForwardClassification, String>,
    pub backward: std::result::Result<BackwardClassification, String>,
}

/// Scan results over a grid.
#[derive(Debug, Clone)]
pub struct ScanTable {
    pub params: ModelParams,
    pub epsilon: f64,
    pub entries: Vec<ScanEntry>,
}

impl ScanTable {
    /// Entries whose forward or backward membership is violated.
    pub fn violations(&self) -> Vec<&ScanEntry> {
        self.entries
            .iter()
            .filter(|e| {
                matches!(&e.forward, Ok(c) if matches!(c.membership, Membership::Violated(_)))
                    || matches!(&e.backward, Ok(c) if matches!(c.membership, Membership::Violated(_)))
            })
            .collect()
    }

    /// Entries where either direction failed to classify.
    pub fn failures(&self) -> Vec<&ScanEntry> {
        self.entries.iter().filter(|e| e.forward.is_err() || e.backward.is_err()).collect()
    }
}

/// Classifies every grid point in both directions. Runs in parallel when
/// the `parallel` feature is enabled; entry order follows the grid
/// (f outer, f' inner) either way.
pub fn scan(p: &ModelParams, grid: &ScanGrid, cfg: &IntegratorConfig) -> ScanTable {
    let mut points = Vec::with_capacity(grid.f_values.len() * grid.fp_values.len());
    for &f in &grid.f_values {
        for &fp in &grid.fp_values {
            points.push((f, fp));
        }
    }
    let entries = par::map_collect(&points, |&(f, fp)| {
        let init = State::new(grid.epsilon, f, fp);
        let (fwd, bwd) = classify_both(p, init, cfg);
        ScanEntry {
            f_eps: f,
            fp_eps: fp,
            forward: fwd.map_err(|e| e.to_string()),
            backward: bwd.map_err(|e| e.to_string()),
        }
    });
    ScanTable { params: *p, epsilon: grid.epsilon, entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::seed_from_origin;

    fn params(n: u32, kappa: f64, lambda: f64) -> ModelParams {
        ModelParams::new(n, kappa, lambda).unwrap()
    }

    #[test]
    fn case_assignment_follows_the_quadrants() {
        assert_eq!(TheoremCase::from_signs(1.0, 1.0).unwrap(), TheoremCase::I);
        assert_eq!(TheoremCase::from_signs(-1.0, 1.0).unwrap(), TheoremCase::II);
        assert_eq!(TheoremCase::from_signs(1.0, -1.0).unwrap(), TheoremCase::III);
        assert_eq!(TheoremCase::from_signs(-1.0, -1.0).unwrap(), TheoremCase::IV);
        assert!(TheoremCase::from_signs(0.0, 1.0).is_err());
        assert!(TheoremCase::from_signs(1.0, 0.0).is_err());
    }

    #[test]
    fn forward_quadrants_land_in_their_menus() {
        let p = params(3, 1.0, 1.0);
        let cfg = IntegratorConfig::default();
        for (f, fp) in [(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)] {
            let out = classify_forward(&p, State::new(0.1, f, fp), &cfg).unwrap();
            assert_eq!(
                out.membership,
                Membership::Holds,
                "({f}, {fp}) -> {}",
                out.outcome.describe()
            );
        }
    }

    #[test]
    fn case_i_forward_is_a_negative_log_branch() {
        let p = params(3, 1.0, 1.0);
        let cfg = IntegratorConfig::default();
        let out = classify_forward(&p, State::new(0.1, 1.0, 1.0), &cfg).unwrap();
        assert_eq!(out.case, TheoremCase::I);
        match out.outcome {
            ForwardOutcome::Branch(rep) => {
                assert_eq!(rep.kind.tag(), "logarithmic");
                assert!(rep.chat.unwrap() < 0.0);
            }
            other => panic!("expected branch, got {}", other.describe()),
        }
    }

    #[test]
    fn case_ii_forward_is_a_negative_algebraic_branch() {
        let p = params(3, 1.0, 1.0);
        let cfg = IntegratorConfig::default();
        let out = classify_forward(&p, State::new(0.1, -1.0, 1.0), &cfg).unwrap();
        assert_eq!(out.case, TheoremCase::II);
        match out.outcome {
            ForwardOutcome::Branch(rep) => match rep.kind {
                BranchKind::Algebraic { c0, .. } => assert!(c0 < 0.0, "c0 = {c0}"),
                other => panic!("expected algebraic, got {other:?}"),
            },
            other => panic!("expected branch, got {}", other.describe()),
        }
    }

    #[test]
    fn backward_regular_seed_roundtrips_through_classification() {
        // Seeding at 0.01 keeps the truncation of the three-term seed series
        // (whose first omitted term scales like r^5 in f') below the 1e-3
        // tolerance on the recovered constants; at 0.05 the seed already
        // sits on a neighbouring profile with a off by a few percent.
        let p = params(3, 1.0, 1.0);
        let cfg = IntegratorConfig::default();
        let seed =
            seed_from_origin(&p, &OriginBehavior::RegularA { f0: 1.0, a: 2.0 }, 0.01).unwrap();
        let out = classify_backward(&p, seed, &cfg).unwrap();
        match out.outcome {
            BackwardOutcome::Origin(fit) => match fit.behavior {
                OriginBehavior::RegularA { f0, a } => {
                    assert!((f0 - 1.0).abs() < 1e-3, "f0 = {f0}");
                    assert!((a - 2.0).abs() / 2.0 < 1e-3, "a = {a}");
                }
                other => panic!("expected RegularA, got {}", other.tag()),
            },
            other => panic!("expected origin fit, got {}", other.describe()),
        }
        assert_eq!(out.membership, Membership::Holds);
    }

    #[test]
    fn backward_vanishing_seed_is_recovered_and_permitted() {
        // Seeding at 0.02 keeps the seed-truncation boundary layer (where
        // the trajectory departs from the vanishing profile) well inside
        // the origin zone.
        let p = params(3, 1.0, 1.0);
        let cfg = IntegratorConfig::default();
        let seed = seed_from_origin(&p, &OriginBehavior::Vanishing, 0.02).unwrap();
        let out = classify_backward(&p, seed, &cfg).unwrap();
        assert_eq!(out.case, TheoremCase::IV);
        match out.outcome {
            BackwardOutcome::Origin(fit) => assert_eq!(fit.behavior.tag(), "vanishing"),
            other => panic!("expected origin fit, got {}", other.describe()),
        }
        assert_eq!(out.membership, Membership::Holds);
    }

    #[test]
    fn membership_flags_foreign_outcomes() {
        let p = params(3, 1.0, 1.0);
        let alg_pos = SingularityReport {
            kind: BranchKind::Algebraic { r0: 1.0, c0: 2.0 },
            indicator_limit: -2.0,
            fit_residual: 1e-9,
            chat: None,
            chat_law_deviation: None,
        };
        match forward_menu_permits(&p, TheoremCase::I, &ForwardOutcome::Branch(alg_pos)) {
            Membership::Violated(msg) => assert!(msg.contains("case i")),
            other => panic!("expected violation, got {other:?}"),
        }
    }

    #[test]
    fn menus_require_nonzero_lambda() {
        let p = params(3, 1.0, 0.0);
        let rep = SingularityReport {
            kind: BranchKind::Algebraic { r0: 1.0, c0: 2.0 },
            indicator_limit: -2.0,
            fit_residual: 1e-9,
            chat: None,
            chat_law_deviation: None,
        };
        assert_eq!(
            forward_menu_permits(&p, TheoremCase::I, &ForwardOutcome::Branch(rep)),
            Membership::NotApplicable
        );
    }

    #[test]
    fn lemma_check_accepts_clean_runs_and_flags_flips() {
        let p = params(3, 1.0, 1.0);
        let cfg = IntegratorConfig::default();
        let traj = integrate(&p, State::new(0.1, 1.0, 1.0), 10.0, &cfg).unwrap();
        assert!(check_lemma(&traj).ok);

        let flipped = Trajectory::from_samples(
            p,
            vec![State::new(0.1, 1.0, 1.0), State::new(0.2, 0.5, 1.0), State::new(0.3, -0.5, 1.0)],
            Termination::ReachedBound { r: 0.3 },
        )
        .unwrap();
        let check = check_lemma(&flipped);
        assert!(!check.ok);
        assert!(check.detail.unwrap().contains("f changed sign"));
    }

    #[test]
    fn scan_covers_the_grid_without_violations() {
        let p = params(3, 1.0, 1.0);
        let cfg = IntegratorConfig::default();
        let grid = ScanGrid::new(vec![-1.0, 1.0], vec![-1.0, 1.0], 0.1).unwrap();
        let table = scan(&p, &grid, &cfg);
        assert_eq!(table.entries.len(), 4);
        assert!(table.violations().is_empty());
        assert!(table.failures().is_empty());
    }

    #[test]
    fn square_grid_validation() {
        assert!(ScanGrid::square(2.0, -2.0, 6, 0.1).is_err());
        assert!(ScanGrid::square(-2.0, 2.0, 1, 0.1).is_err());
        let grid = ScanGrid::square(-2.0, 2.0, 6, 0.1).unwrap();
        assert_eq!(grid.f_values.len(), 6);
        assert!((grid.f_values[1] - (-1.2)).abs() < 1e-12);
    }
}
