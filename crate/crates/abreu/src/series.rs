//! Local expansions at the origin, at infinity, and at movable branch points.
//!
//! Solutions of the reduced equation admit four behaviours as r -> 0+:
//!
//! * `RegularA`: f ~ f0 + a r^n - lambda a^2 n^2/(n+1) r^(n+1), any lambda,
//!   with two free constants f0 != 0 and a;
//! * `RegularB`: f ~ f0 + r^(n-1)/(lambda (n-1)) for lambda != 0, n >= 3,
//!   with the n = 2 variant f ~ f0 + r/lambda - r^2/(4 lambda^2 f0);
//! * `Vanishing`: f ~ -n(n-2)/(lambda (n-1)) r^(n-1) for lambda != 0, n >= 3,
//!   with no free constants;
//! * `ExactPole`: the exact solution f = 2n^2/(kappa r), lambda = 0 only.
//!
//! As r -> infinity (relevant when lambda = 0 or along case-(iii)/(iv)
//! solutions) f either tends to a constant, f ~ f_inf + n(n+1)/(kappa r), or
//! decays, f ~ 2n^2/(kappa r). At a movable singularity r0 the solution ends
//! in either an algebraic branch point f ~ c0 (r0 - r)^(1/n) or a
//! logarithmic one f ~ chat log(r0 - r), where chat is not free but pinned
//! to the location: chat = (lambda/r0^(n-1) - kappa r0/n)^(-1).
//!
//! [`fit_origin_behavior`] identifies which origin expansion generated a set
//! of samples by least squares over each admissible candidate's free
//! constants, picking the smallest normalized residual (ties go to the
//! expansion with fewer free constants).

use crate::linalg::{least_squares, rms};
use crate::model::{exact_lambda0, ModelParams, State};
use crate::{Error, Result};

/// Behaviour of a solution as r -> 0+.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OriginBehavior {
    /// f ~ f0 + a r^n - lambda a^2 n^2/(n+1) r^(n+1); f0 != 0, a free.
    RegularA { f0: f64, a: f64 },
    /// f ~ f0 + r^(n-1)/(lambda (n-1)) (n >= 3) or the n = 2 variant
    /// f ~ f0 + r/lambda - r^2/(4 lambda^2 f0); f0 != 0, lambda != 0.
    RegularB { f0: f64 },
    /// f ~ -n(n-2)/(lambda (n-1)) r^(n-1); lambda != 0, n >= 3.
    Vanishing,
    /// f = 2n^2/(kappa r) exactly; lambda = 0 only.
    ExactPole,
}

impl OriginBehavior {
    /// Number of free constants the expansion carries.
    pub fn free_constants(&self) -> usize {
        match self {
            OriginBehavior::RegularA { .. } => 2,
            OriginBehavior::RegularB { .. } => 1,
            OriginBehavior::Vanishing | OriginBehavior::ExactPole => 0,
        }
    }

    /// Short stable name used in tables and CLI output.
    pub fn tag(&self) -> &'static str {
        match self {
            OriginBehavior::RegularA { .. } => "regular-a",
            OriginBehavior::RegularB { .. } => "regular-b",
            OriginBehavior::Vanishing => "vanishing",
            OriginBehavior::ExactPole => "exact-pole",
        }
    }

    /// Rejects behaviour/parameter combinations with no defined expansion.
    pub fn check(&self, p: &ModelParams) -> Result<()> {
        match self {
            OriginBehavior::RegularA { f0, .. } => {
                if *f0 == 0.0 {
                    return Err(Error::InconsistentBehavior(
                        "RegularA requires f0 != 0 (f0 = 0 is the vanishing family)".into(),
                    ));
                }
            }
            OriginBehavior::RegularB { f0 } => {
                if *f0 == 0.0 {
                    return Err(Error::InconsistentBehavior("RegularB requires f0 != 0".into()));
                }
                if p.lambda == 0.0 {
                    return Err(Error::InconsistentBehavior(
                        "RegularB requires lambda != 0".into(),
                    ));
                }
                if p.n < 2 {
                    return Err(Error::InconsistentBehavior(
                        "RegularB is undefined for n = 1 (its r^(n-1) term is constant)".into(),
                    ));
                }
            }
            OriginBehavior::Vanishing => {
                if p.lambda == 0.0 {
                    return Err(Error::InconsistentBehavior(
                        "Vanishing requires lambda != 0".into(),
                    ));
                }
                if p.n == 2 || p.n == 1 {
                    return Err(Error::InconsistentBehavior(format!(
                        "Vanishing requires n >= 3, got n = {}",
                        p.n
                    )));
                }
            }
            OriginBehavior::ExactPole => {
                if p.lambda != 0.0 {
                    return Err(Error::InconsistentBehavior(
                        "ExactPole is the lambda = 0 solution".into(),
                    ));
                }
                if p.kappa == 0.0 {
                    return Err(Error::InvalidParams("ExactPole requires kappa != 0".into()));
                }
            }
        }
        Ok(())
    }
}

/// Behaviour of a solution as r -> infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InfinityBehavior {
    /// f ~ f_inf + n(n+1)/(kappa r), f_inf != 0.
    ConstAsymptote { f_inf: f64 },
    /// f ~ 2n^2/(kappa r).
    DecayAsymptote,
}

impl InfinityBehavior {
    pub fn tag(&self) -> &'static str {
        match self {
            InfinityBehavior::ConstAsymptote { .. } => "const-asymptote",
            InfinityBehavior::DecayAsymptote => "decay-asymptote",
        }
    }

    /// The predicted 1/r correction coefficient for this behaviour.
    pub fn correction_coefficient(&self, p: &ModelParams) -> f64 {
        match self {
            InfinityBehavior::ConstAsymptote { .. } => p.nf() * (p.nf() + 1.0) / p.kappa,
            InfinityBehavior::DecayAsymptote => 2.0 * p.nf() * p.nf() / p.kappa,
        }
    }
}

/// Kind of movable singularity terminating a solution at finite r0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BranchKind {
    /// f ~ c0 (r0 - r)^(1/n) from below, c0 (r - r0)^(1/n) from above.
    Algebraic { r0: f64, c0: f64 },
    /// f ~ chat log|r - r0| with chat determined by r0 via
    /// [`log_coefficient`].
    Logarithmic { r0: f64 },
}

impl BranchKind {
    pub fn r0(&self) -> f64 {
        match self {
            BranchKind::Algebraic { r0, .. } | BranchKind::Logarithmic { r0 } => *r0,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            BranchKind::Algebraic { .. } => "algebraic",
            BranchKind::Logarithmic { .. } => "logarithmic",
        }
    }
}

/// The logarithmic branch coefficient chat = (lambda/r0^(n-1) - kappa r0/n)^(-1).
/// For n = 1 the equation is regular across r = 0 and r0 may be any real;
/// for n >= 2 the branch location must be positive.
pub fn log_coefficient(p: &ModelParams, r0: f64) -> Result<f64> {
    if r0 <= 0.0 && p.n >= 2 {
        return Err(Error::NonPositiveRadius { r: r0 });
    }
    let denom = p.lambda / r0.powi(p.n as i32 - 1) - p.kappa * r0 / p.nf();
    if denom == 0.0 {
        return Err(Error::InconsistentBehavior(format!(
            "degenerate logarithmic coefficient: lambda/r0^(n-1) = kappa r0/n at r0 = {r0}"
        )));
    }
    Ok(1.0 / denom)
}

/// (f, f') of the origin expansion at radius r > 0.
pub fn origin_series_eval(p: &ModelParams, b: &OriginBehavior, r: f64) -> Result<(f64, f64)> {
    let (f, fp, _) = origin_series_eval_d2(p, b, r)?;
    Ok((f, fp))
}

/// (f, f', f'') of the origin expansion, with f'' the term-by-term second
/// derivative of the truncated series. Used to measure how well seeded
/// states satisfy the first integral.
pub fn origin_series_eval_d2(
    p: &ModelParams,
    b: &OriginBehavior,
    r: f64,
) -> Result<(f64, f64, f64)> {
    b.check(p)?;
    if r <= 0.0 {
        return Err(Error::NonPositiveRadius { r });
    }
    let n = p.nf();
    let ni = p.n as i32;
    match *b {
        OriginBehavior::RegularA { f0, a } => {
            let cub = p.lambda * a * a * n * n / (n + 1.0);
            // Third coefficient. At this order the 1/f term of the equation
            // couples f0 in for n = 2, and the kappa term enters for n = 1.
            let mut qrt = p.lambda * p.lambda * a * a * a * n * n * n / (n + 2.0);
            if p.n == 2 {
                qrt -= a * a / (2.0 * f0);
            }
            if p.n == 1 {
                qrt += p.kappa * a * a / 6.0;
            }
            let f = f0 + a * r.powi(ni) - cub * r.powi(ni + 1) + qrt * r.powi(ni + 2);
            let fp = a * n * r.powi(ni - 1) - cub * (n + 1.0) * r.powi(ni)
                + qrt * (n + 2.0) * r.powi(ni + 1);
            let fpp = if p.n == 1 {
                -cub * 2.0 + qrt * 6.0 * r
            } else {
                a * n * (n - 1.0) * r.powi(ni - 2) - cub * (n + 1.0) * n * r.powi(ni - 1)
                    + qrt * (n + 2.0) * (n + 1.0) * r.powi(ni)
            };
            Ok((f, fp, fpp))
        }
        OriginBehavior::RegularB { f0 } => {
            if p.n == 2 {
                let f = f0 + r / p.lambda - r * r / (4.0 * p.lambda * p.lambda * f0);
                let fp = 1.0 / p.lambda - r / (2.0 * p.lambda * p.lambda * f0);
                let fpp = -1.0 / (2.0 * p.lambda * p.lambda * f0);
                Ok((f, fp, fpp))
            } else {
                let f = f0 + r.powi(ni - 1) / (p.lambda * (n - 1.0));
                let fp = r.powi(ni - 2) / p.lambda;
                let fpp = (n - 2.0) * r.powi(ni - 3) / p.lambda;
                Ok((f, fp, fpp))
            }
        }
        OriginBehavior::Vanishing => {
            let c = -n * (n - 2.0) / (p.lambda * (n - 1.0));
            let f = c * r.powi(ni - 1);
            let fp = c * (n - 1.0) * r.powi(ni - 2);
            let fpp = c * (n - 1.0) * (n - 2.0) * r.powi(ni - 3);
            Ok((f, fp, fpp))
        }
        OriginBehavior::ExactPole => {
            let (f, fp) = exact_lambda0(p, r)?;
            let fpp = 4.0 * n * n / (p.kappa * r * r * r);
            Ok((f, fp, fpp))
        }
    }
}

/// (f, f') of the infinity expansion at radius r > 0.
pub fn infinity_series_eval(p: &ModelParams, b: &InfinityBehavior, r: f64) -> Result<(f64, f64)> {
    if p.kappa == 0.0 {
        return Err(Error::InvalidParams("infinity expansions require kappa != 0".into()));
    }
    if r <= 0.0 {
        return Err(Error::NonPositiveRadius { r });
    }
    match *b {
        InfinityBehavior::ConstAsymptote { f_inf } => {
            if f_inf == 0.0 {
                return Err(Error::InconsistentBehavior(
                    "ConstAsymptote requires f_inf != 0 (f_inf = 0 is the decaying family)".into(),
                ));
            }
            let c = p.nf() * (p.nf() + 1.0) / p.kappa;
            Ok((f_inf + c / r, -c / (r * r)))
        }
        InfinityBehavior::DecayAsymptote => {
            let c = 2.0 * p.nf() * p.nf() / p.kappa;
            Ok((c / r, -c / (r * r)))
        }
    }
}

/// (f, f') of the branch expansion approached from below, r in (0, r0).
pub fn branch_series_eval(p: &ModelParams, kind: &BranchKind, r: f64) -> Result<(f64, f64)> {
    let r0 = kind.r0();
    if r <= 0.0 {
        return Err(Error::NonPositiveRadius { r });
    }
    if r >= r0 {
        return Err(Error::OutOfDomain { r, lo: 0.0, hi: r0 });
    }
    branch_eval_signed(p, kind, r0 - r, -1.0)
}

/// (f, f') of the branch expansion approached from above, r > r0 (the form
/// met when integrating backward onto a singularity).
pub fn branch_series_eval_above(p: &ModelParams, kind: &BranchKind, r: f64) -> Result<(f64, f64)> {
    let r0 = kind.r0();
    if r <= r0 {
        return Err(Error::OutOfDomain { r, lo: r0, hi: f64::INFINITY });
    }
    branch_eval_signed(p, kind, r - r0, 1.0)
}

fn branch_eval_signed(
    p: &ModelParams,
    kind: &BranchKind,
    s: f64,
    ds_dr: f64,
) -> Result<(f64, f64)> {
    match *kind {
        BranchKind::Algebraic { c0, .. } => {
            if c0 == 0.0 {
                return Err(Error::InconsistentBehavior("Algebraic requires c0 != 0".into()));
            }
            let inv_n = 1.0 / p.nf();
            let f = c0 * s.powf(inv_n);
            let fp = ds_dr * c0 * inv_n * s.powf(inv_n - 1.0);
            Ok((f, fp))
        }
        BranchKind::Logarithmic { r0 } => {
            let chat = log_coefficient(p, r0)?;
            Ok((chat * s.ln(), ds_dr * chat / s))
        }
    }
}

/// Result of origin-behaviour identification: the winning expansion with its
/// fitted constants and the normalized fit residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OriginFit {
    pub behavior: OriginBehavior,
    pub residual: f64,
}

/// Tolerance above which no candidate is accepted and the data is declared
/// unidentified.
const ORIGIN_FIT_REJECT: f64 = 1e-2;

/// Residuals within this factor of the best are treated as ties and resolved
/// in favor of the expansion with fewer free constants.
const ORIGIN_FIT_TIE_FACTOR: f64 = 1.5;

/// Identifies which origin expansion generated `samples` by least squares.
///
/// Requires at least 8 samples whose radii span a decade or more below 0.1.
/// Each expansion admissible for `p` is fitted over its free constants; the
/// candidate with the smallest residual (RMS misfit of f over the samples,
/// normalized by max |f|) wins, with ties broken toward fewer free
/// constants. Residuals above 1e-2 are rejected as unidentified.
pub fn fit_origin_behavior(p: &ModelParams, samples: &[State]) -> Result<OriginFit> {
    if samples.len() < 8 {
        return Err(Error::BadWindow(format!(
            "origin fit needs >= 8 samples, got {}",
            samples.len()
        )));
    }
    let mut r_min = f64::INFINITY;
    let mut r_max = 0.0f64;
    for s in samples {
        if s.r <= 0.0 {
            return Err(Error::NonPositiveRadius { r: s.r });
        }
        r_min = r_min.min(s.r);
        r_max = r_max.max(s.r);
    }
    if r_max > 0.1 * (1.0 + 1e-9) {
        return Err(Error::BadWindow(format!(
            "origin fit window must lie below r = 0.1, got r_max = {r_max}"
        )));
    }
    if r_max / r_min < 10.0 * (1.0 - 1e-9) {
        return Err(Error::BadWindow(format!(
            "origin fit window must span a decade, got [{r_min}, {r_max}]"
        )));
    }

    let r: Vec<f64> = samples.iter().map(|s| s.r).collect();
    let f: Vec<f64> = samples.iter().map(|s| s.f).collect();
    let scale = f.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1e-300);

    let mut candidates: Vec<OriginFit> = Vec::new();
    if let Some(fit) = fit_regular_a(p, &r, &f, scale) {
        candidates.push(fit);
    }
    if p.lambda != 0.0 && p.n >= 2 {
        if let Some(fit) = fit_regular_b(p, &r, &f, scale) {
            candidates.push(fit);
        }
    }
    if p.lambda != 0.0 && p.n >= 3 {
        candidates.push(score_fixed(p, &OriginBehavior::Vanishing, &r, &f, scale));
    }
    if p.lambda == 0.0 && p.kappa != 0.0 {
        candidates.push(score_fixed(p, &OriginBehavior::ExactPole, &r, &f, scale));
    }

    let best = candidates.iter().map(|c| c.residual).fold(f64::INFINITY, f64::min);
    if !best.is_finite() || best > ORIGIN_FIT_REJECT {
        return Err(Error::UnidentifiedOrigin {
            best_residual: best,
            detail: candidates
                .iter()
                .map(|c| format!("{} = {:.3e}", c.behavior.tag(), c.residual))
                .collect::<Vec<_>>()
                .join(", "),
        });
    }
    let winner = candidates
        .iter()
        .filter(|c| c.residual <= best * ORIGIN_FIT_TIE_FACTOR)
        .min_by_key(|c| c.behavior.free_constants())
        .copied()
        .unwrap();
    Ok(winner)
}

fn residual_of(p: &ModelParams, b: &OriginBehavior, r: &[f64], f: &[f64], scale: f64) -> f64 {
    let mut errs = Vec::with_capacity(r.len());
    for (ri, fi) in r.iter().zip(f) {
        match origin_series_eval(p, b, *ri) {
            Ok((m, _)) => errs.push(fi - m),
            Err(_) => return f64::INFINITY,
        }
    }
    rms(&errs) / scale
}

fn score_fixed(p: &ModelParams, b: &OriginBehavior, r: &[f64], f: &[f64], scale: f64) -> OriginFit {
    OriginFit { behavior: *b, residual: residual_of(p, b, r, f, scale) }
}

/// Windowed fit residual for the regular-A refinement loop: below this the
/// window is considered free of unmodeled series terms.
const REGULAR_A_CLEAN: f64 = 1e-8;

fn fit_regular_a(p: &ModelParams, r: &[f64], f: &[f64], scale: f64) -> Option<OriginFit> {
    // Unconstrained fit over the first four series powers; f0 and a are the
    // leading coefficients, while the two correction columns absorb the
    // known higher terms without the nonlinear coupling entering the solve.
    // The first unmodeled term grows like r^(n+3) and, through the near
    // collinearity of adjacent powers, leaks percent-level errors into a
    // when the window top is large; the window is halved until the fit is
    // clean or the decade-span minimum is reached.
    let ni = p.n as i32;
    let fit_on = |r: &[f64], f: &[f64]| -> Option<(f64, f64, f64)> {
        let ones = vec![1.0; r.len()];
        let rn: Vec<f64> = r.iter().map(|v| v.powi(ni)).collect();
        let rn1: Vec<f64> = r.iter().map(|v| v.powi(ni + 1)).collect();
        let rn2: Vec<f64> = r.iter().map(|v| v.powi(ni + 2)).collect();
        let c = least_squares(&[&ones, &rn, &rn1, &rn2], f).ok()?;
        if c[0] == 0.0 {
            return None;
        }
        let b = OriginBehavior::RegularA { f0: c[0], a: c[1] };
        Some((c[0], c[1], residual_of(p, &b, r, f, scale)))
    };

    let r_min = r.iter().fold(f64::INFINITY, |acc, v| acc.min(*v));
    let mut cap = r.iter().fold(0.0f64, |acc, v| acc.max(*v));
    let (mut f0, mut a, mut win_residual) = fit_on(r, f)?;
    while win_residual > REGULAR_A_CLEAN && cap * 0.5 >= 10.0 * r_min {
        cap *= 0.5;
        let (rw, fw): (Vec<f64>, Vec<f64>) =
            r.iter().zip(f).filter(|(ri, _)| **ri <= cap).map(|(ri, fi)| (*ri, *fi)).unzip();
        if rw.len() < 8 {
            break;
        }
        match fit_on(&rw, &fw) {
            Some(next) => (f0, a, win_residual) = next,
            None => break,
        }
    }

    let b = OriginBehavior::RegularA { f0, a };
    Some(OriginFit { behavior: b, residual: residual_of(p, &b, r, f, scale) })
}

fn fit_regular_b(p: &ModelParams, r: &[f64], f: &[f64], scale: f64) -> Option<OriginFit> {
    let n = p.nf();
    let ni = p.n as i32;
    // Subtract the parameter-free leading term, then fit f0 alongside free
    // columns for the next series powers.
    let (y, cols): (Vec<f64>, [Vec<f64>; 2]) = if p.n == 2 {
        let y = f.iter().zip(r).map(|(fi, ri)| fi - ri / p.lambda).collect();
        let r2 = r.iter().map(|v| v * v).collect();
        let r3 = r.iter().map(|v| v * v * v).collect();
        (y, [r2, r3])
    } else {
        let y =
            f.iter().zip(r).map(|(fi, ri)| fi - ri.powi(ni - 1) / (p.lambda * (n - 1.0))).collect();
        let rn = r.iter().map(|v| v.powi(ni)).collect();
        let r2n2 = r.iter().map(|v| v.powi(2 * ni - 2)).collect();
        (y, [rn, r2n2])
    };
    let ones = vec![1.0; r.len()];
    let c = least_squares(&[&ones, &cols[0], &cols[1]], &y).ok()?;
    let f0 = c[0];
    if f0 == 0.0 {
        return None;
    }
    let b = OriginBehavior::RegularB { f0 };
    Some(OriginFit { behavior: b, residual: residual_of(p, &b, r, f, scale) })
}
