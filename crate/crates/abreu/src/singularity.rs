//! Classification of movable singularities from trajectory tails.
//!
//! A solution ending in finite-radius blow-up does so through one of two
//! branch points: algebraic, f ~ c0 s^(1/n), or logarithmic, f ~ chat log s,
//! with s the distance to the singularity. The two are separated by
//! indicator functions evaluated along the final accepted steps:
//!
//! * I = f f''/(f')^2 tends to 1 - n at an algebraic branch point while |f|
//!   shrinks;
//! * J = f''/(f')^2 tends to -1/chat at a logarithmic one while |f| grows.
//!
//! Whichever indicator settles (relative spread of its last values <= 0.1,
//! and for I also proximity to 1 - n) selects the kind. One mixed tail is
//! also recognized: J settled while |f| shrinks and |f'| grows is a
//! logarithmic transient sliding toward the f = 0 singular set, whose
//! terminal behavior is algebraic even though the asymptotic regime sits
//! exponentially far below the resolved scales; it is reported as algebraic
//! with a connection estimate for the coefficient. If nothing matches, the
//! tail is reported as unclassifiable together with both indicators. The
//! branch location and coefficient are otherwise recovered from linear
//! structure that is exact at leading order: f^n is affine in r near an
//! algebraic branch point, and 1/f' is affine in r near a logarithmic one,
//! in both cases with root at the branch location. Indicator limits are
//! reported after extrapolating the leading correction (O(s^(1/n)) for I,
//! O(1/log s) for J) to zero.

use crate::integrate::Trajectory;
use crate::linalg::{least_squares, rms};
use crate::model::{rhs_second_order, ModelParams, State};
use crate::series::{log_coefficient, BranchKind};
use crate::{Error, Result};

/// Samples used for fitting: drawn from the trajectory tail, excluding the
/// final two samples (closest to the singularity, largest local error),
/// subsampled at geometrically spaced distances from the end. A controller
/// tracking a singularity makes steps proportional to the remaining
/// distance, so consecutive samples differ by well under a percent of it;
/// geometric spacing restores a multi-decade window that the correction
/// terms are resolvable on.
const WINDOW_MAX: usize = 30;
const WINDOW_MIN: usize = 15;
const WINDOW_SKIP_END: usize = 2;
const WINDOW_RATIO: f64 = 1.6;

/// Indicator convergence is judged on this many trailing window points.
const TAIL: usize = 10;

/// Maximum relative spread of the trailing indicator values.
const SPREAD_ACCEPT: f64 = 0.1;

/// Maximum relative distance of the I median from 1 - n for the algebraic
/// reading.
const INDICATOR_ACCEPT: f64 = 0.1;

/// Identified branch point with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularityReport {
    pub kind: BranchKind,
    /// Extrapolated indicator limit: I for algebraic, J for logarithmic and
    /// for the transient algebraic reading.
    pub indicator_limit: f64,
    /// Normalized RMS residual of the defining linear fit.
    pub fit_residual: f64,
    /// Fitted logarithmic coefficient (logarithmic kind only).
    pub chat: Option<f64>,
    /// Relative deviation of `chat` from the location law
    /// chat = (lambda/r0^(n-1) - kappa r0/n)^(-1) (logarithmic kind only).
    pub chat_law_deviation: Option<f64>,
}

/// Classifies the singular end of a trajectory whose integration terminated
/// in blow-up or step collapse.
///
/// The kind is selected on the dense trajectory tail, where the indicators
/// are closest to their limits; the location and coefficient fits then run
/// on a geometrically subsampled window whose multi-decade span resolves
/// the correction terms.
pub fn classify_branch(traj: &Trajectory) -> Result<SingularityReport> {
    if !traj.termination.is_singular() {
        return Err(Error::InconsistentBehavior(format!(
            "trajectory ended with '{}', not a singular termination",
            traj.termination.tag()
        )));
    }
    let p = &traj.params;
    let dir = traj.direction();
    let samples = &traj.samples;
    if samples.len() < TAIL + WINDOW_SKIP_END {
        return Err(Error::BadWindow(format!(
            "branch classification needs >= {} samples, got {}",
            TAIL + WINDOW_SKIP_END,
            samples.len()
        )));
    }
    let tail = &samples[samples.len() - TAIL - WINDOW_SKIP_END..samples.len() - WINDOW_SKIP_END];

    let mut i_tail = Vec::with_capacity(TAIL);
    let mut j_tail = Vec::with_capacity(TAIL);
    for s in tail {
        let fpp = rhs_second_order(p, s)?;
        let fp2 = s.fp * s.fp;
        i_tail.push(s.f * fpp / fp2);
        j_tail.push(fpp / fp2);
    }
    let i_med = median(&i_tail);
    let j_med = median(&j_tail);
    let i_spread = rel_spread(&i_tail);
    let j_spread = rel_spread(&j_tail);

    let f_first = tail[0].f.abs();
    let f_last = tail[tail.len() - 1].f.abs();
    let fp_first = tail[0].fp.abs();
    let fp_last = tail[tail.len() - 1].fp.abs();
    let alg_limit = 1.0 - p.nf();
    let alg_ok = i_spread <= SPREAD_ACCEPT
        && (i_med - alg_limit).abs() <= INDICATOR_ACCEPT * alg_limit.abs()
        && f_last < f_first;
    let log_ok = j_spread <= SPREAD_ACCEPT && f_last > f_first;
    // Third reading: J settled while |f| shrinks and |f'| diverges. The
    // logarithmic form cannot be terminal with |f| heading to zero; the
    // solution is in a logarithmic transient sliding toward the f = 0
    // algebraic endpoint, which sits exponentially close behind the fitted
    // location.
    let transient = j_spread <= SPREAD_ACCEPT && f_last < f_first && fp_last > fp_first;

    match (alg_ok, log_ok) {
        (true, false) => {
            let window = fit_window(samples)?;
            fit_algebraic(p, &window, dir)
        }
        (false, true) => {
            let window = fit_window(samples)?;
            fit_logarithmic(p, &window, dir)
        }
        (false, false) if transient => {
            let window = fit_window(samples)?;
            fit_transient_algebraic(p, &window, dir, j_med)
        }
        _ => Err(Error::UnclassifiedBranch {
            algebraic_indicator: i_med,
            algebraic_spread: i_spread,
            logarithmic_indicator: j_med,
            logarithmic_spread: j_spread,
        }),
    }
}

/// Indicator values I (algebraic) and J (logarithmic) over a sample window.
fn indicator_values(p: &ModelParams, window: &[State]) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut i_vals = Vec::with_capacity(window.len());
    let mut j_vals = Vec::with_capacity(window.len());
    for s in window {
        let fpp = rhs_second_order(p, s)?;
        let fp2 = s.fp * s.fp;
        i_vals.push(s.f * fpp / fp2);
        j_vals.push(fpp / fp2);
    }
    Ok((i_vals, j_vals))
}

fn fit_window(samples: &[State]) -> Result<Vec<State>> {
    let avail = samples.len().saturating_sub(WINDOW_SKIP_END);
    if avail < WINDOW_MIN {
        return Err(Error::BadWindow(format!(
            "branch classification needs >= {WINDOW_MIN} samples before the final \
             {WINDOW_SKIP_END}, got {avail}"
        )));
    }
    let anchor = samples[samples.len() - 1].r;
    let mut kept: Vec<State> = Vec::with_capacity(WINDOW_MAX);
    let mut target = 0.0;
    for s in samples[..avail].iter().rev() {
        let d = (s.r - anchor).abs();
        if d >= target {
            kept.push(*s);
            target = (d * WINDOW_RATIO).max(f64::MIN_POSITIVE);
            if kept.len() == WINDOW_MAX {
                break;
            }
        }
    }
    if kept.len() < WINDOW_MIN {
        return Err(Error::BadWindow(format!(
            "branch classification needs >= {WINDOW_MIN} geometrically spaced samples, \
             found {}",
            kept.len()
        )));
    }
    kept.reverse();
    Ok(kept)
}

fn median(v: &[f64]) -> f64 {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let m = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[m]
    } else {
        0.5 * (sorted[m - 1] + sorted[m])
    }
}

fn rel_spread(v: &[f64]) -> f64 {
    let max = v.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let min = v.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    (max - min) / median(v).abs().max(1e-300)
}

/// Least-squares line through (x, y) with x centered at its mean; returns
/// (x_mean, value at x_mean, slope). Centering keeps the normal equations
/// well conditioned when the x span is tiny relative to its magnitude, as
/// it is for radii clustered against a singularity.
fn centered_line(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    let n = x.len() as f64;
    let xm = x.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        let dx = xi - xm;
        sxx += dx * dx;
        sxy += dx * (yi - ym);
    }
    if sxx == 0.0 {
        return Err(Error::BadWindow("degenerate fit: all abscissae coincide".into()));
    }
    Ok((xm, ym, sxy / sxx))
}

/// Extrapolates indicator values to the singularity by fitting them affinely
/// in the correction variable z (z -> 0 at the branch point).
fn extrapolate_limit(z: &[f64], vals: &[f64]) -> Result<f64> {
    let (zm, vm, slope) = centered_line(z, vals)?;
    Ok(vm - slope * zm)
}

fn fit_algebraic(p: &ModelParams, window: &[State], dir: f64) -> Result<SingularityReport> {
    let r: Vec<f64> = window.iter().map(|s| s.r).collect();
    let fn_pow: Vec<f64> = window.iter().map(|s| s.f.powi(p.n as i32)).collect();
    let r_last = window[window.len() - 1].r;
    let (i_vals, _) = indicator_values(p, window)?;

    // At leading order f^n is proportional to shat = dir (r0 - r), the
    // distance to the branch point, so a line through (r, f^n) seeds r0
    // from its root. Over a multi-decade window the O(shat^(1/n)) relative
    // correction bends that line enough to push the root inside the data,
    // so the seed is clipped ahead of the trajectory end and refined
    // against the two-column model f^n = A shat + B shat^(1+1/n).
    let (xm, ym, slope) = centered_line(&r, &fn_pow)?;
    if slope == 0.0 {
        return Err(Error::InconsistentBehavior("f^n shows no linear trend in r".into()));
    }
    let mut r0 = xm - ym / slope;
    let d_min = (r_last - window[window.len() - 2].r).abs();
    if (r0 - r_last) * dir <= 0.0 {
        r0 = r_last + dir * 0.5 * d_min;
    }

    let expo = 1.0 + 1.0 / p.nf();
    let two_col = |r0: f64| -> Result<(f64, f64, f64)> {
        if (r0 - r_last) * dir <= 0.0 {
            return Err(Error::InconsistentBehavior(format!(
                "fitted branch location {r0} lies behind the trajectory end {r_last}"
            )));
        }
        let shat: Vec<f64> = r.iter().map(|ri| (r0 - ri) * dir).collect();
        let shat_corr: Vec<f64> = shat.iter().map(|s| s.powf(expo)).collect();
        let coef = least_squares(&[&shat, &shat_corr], &fn_pow)?;
        if coef[0] == 0.0 {
            return Err(Error::InconsistentBehavior(
                "f^n shows no linear trend in the branch distance".into(),
            ));
        }
        let misfit: Vec<f64> = shat
            .iter()
            .zip(&shat_corr)
            .zip(&fn_pow)
            .map(|((si, sc), yi)| yi - (coef[0] * si + coef[1] * sc))
            .collect();
        let scale = fn_pow.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
        Ok((coef[0], coef[1], rms(&misfit) / scale))
    };
    for _ in 0..2 {
        let (a_lin, b_corr, _) = two_col(r0)?;
        let mut roots = Vec::with_capacity(r.len());
        for ((ri, yi), si) in r.iter().zip(&fn_pow).zip(r.iter().map(|ri| (r0 - ri) * dir)) {
            let denom = a_lin + b_corr * si.abs().powf(expo - 1.0);
            if denom.is_finite() && denom != 0.0 {
                roots.push(ri + dir * (yi / denom));
            }
        }
        if roots.len() < 3 {
            break;
        }
        let refined = median(&roots);
        if (refined - r_last) * dir > 0.0 {
            r0 = refined;
        }
    }
    let (c0n, _, fit_residual) = two_col(r0)?;

    let f_sign = median(&window.iter().map(|s| s.f).collect::<Vec<_>>()).signum();
    if !p.n.is_multiple_of(2) && c0n.signum() != f_sign {
        return Err(Error::InconsistentBehavior(
            "sign of the fitted c0^n contradicts the sign of f".into(),
        ));
    }
    if p.n.is_multiple_of(2) && c0n <= 0.0 {
        return Err(Error::InconsistentBehavior("fitted c0^n must be positive for even n".into()));
    }
    let c0 = f_sign * c0n.abs().powf(1.0 / p.nf());

    let z: Vec<f64> = r.iter().map(|ri| (ri - r0).abs().powf(1.0 / p.nf())).collect();
    let indicator_limit = extrapolate_limit(&z, &i_vals)?;

    Ok(SingularityReport {
        kind: BranchKind::Algebraic { r0, c0 },
        indicator_limit,
        fit_residual,
        chat: None,
        chat_law_deviation: None,
    })
}

fn fit_logarithmic(p: &ModelParams, window: &[State], dir: f64) -> Result<SingularityReport> {
    let r: Vec<f64> = window.iter().map(|s| s.r).collect();
    let inv_fp: Vec<f64> = window.iter().map(|s| 1.0 / s.fp).collect();
    let r_last = window[window.len() - 1].r;
    let (_, j_vals) = indicator_values(p, window)?;

    // Near the branch point 1/f' = t/chat + beta t/log|t| + ... with
    // t = r - r0, and every term vanishes at t = 0. A line through
    // (r, 1/f') therefore pins both unknowns at once: chat from the slope
    // and r0 from the root. Locating r0 this way avoids amplifying its
    // error through the samples closest to the singularity, where |t| is
    // smallest.
    let (xm, ym, slope) = centered_line(&r, &inv_fp)?;
    if slope == 0.0 {
        return Err(Error::InconsistentBehavior("1/f' shows no linear trend in r".into()));
    }
    let mut r0 = xm - ym / slope;
    let d_min = (r_last - window[window.len() - 2].r).abs();
    if (r0 - r_last) * dir <= 0.0 {
        r0 = r_last + dir * 0.5 * d_min;
    }

    // Refinement: the two-column fit absorbs the leading logarithmic
    // correction into its second column, sharpening chat; inverting the
    // fitted model at each sample then sharpens r0 in turn. The curvature
    // that the second column models can bend the seed line enough to push
    // its root inside the data, hence the clip above.
    let two_col = |r0: f64| -> Result<(f64, f64, f64)> {
        if (r0 - r_last) * dir <= 0.0 {
            return Err(Error::InconsistentBehavior(format!(
                "fitted branch location {r0} lies behind the trajectory end {r_last}"
            )));
        }
        let t: Vec<f64> = r.iter().map(|ri| ri - r0).collect();
        let t_over_log: Vec<f64> = t.iter().map(|ti| ti / ti.abs().ln()).collect();
        if t_over_log.iter().any(|v| !v.is_finite()) {
            return Err(Error::BadWindow(
                "window extends to |r - r0| >= 1, outside the branch expansion".into(),
            ));
        }
        let coef = least_squares(&[&t, &t_over_log], &inv_fp)?;
        if coef[0] == 0.0 {
            return Err(Error::InconsistentBehavior("1/f' shows no linear trend in r - r0".into()));
        }
        let misfit: Vec<f64> = t
            .iter()
            .zip(&t_over_log)
            .zip(&inv_fp)
            .map(|((ti, tl), yi)| yi - (coef[0] * ti + coef[1] * tl))
            .collect();
        let scale = inv_fp.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
        Ok((coef[0], coef[1], rms(&misfit) / scale))
    };
    for _ in 0..2 {
        let (c_lin, c_log, _) = two_col(r0)?;
        let mut roots = Vec::with_capacity(r.len());
        for ((ri, yi), ti) in r.iter().zip(&inv_fp).zip(r.iter().map(|ri| ri - r0)) {
            let denom = c_lin + c_log / ti.abs().ln();
            if denom.is_finite() && denom != 0.0 {
                roots.push(ri - yi / denom);
            }
        }
        if roots.len() < 3 {
            break;
        }
        let refined = median(&roots);
        if (refined - r_last) * dir > 0.0 {
            r0 = refined;
        }
    }
    let (c_lin, _, fit_residual) = two_col(r0)?;
    let chat = 1.0 / c_lin;

    let w: Vec<f64> = r.iter().map(|ri| 1.0 / (ri - r0).abs().ln()).collect();
    let indicator_limit = extrapolate_limit(&w, &j_vals)?;

    let chat_law_deviation =
        log_coefficient(p, r0).ok().map(|law| (chat - law).abs() / law.abs().max(1e-300));

    Ok(SingularityReport {
        kind: BranchKind::Logarithmic { r0 },
        indicator_limit,
        fit_residual,
        chat: Some(chat),
        chat_law_deviation,
    })
}

/// Fits a tail that obeys the logarithmic structure while |f| shrinks and
/// |f'| diverges. Such a tail cannot end logarithmically: the log form
/// needs |f| to grow without bound. Instead f is sliding toward the f = 0
/// singular set on the slow scale chat = -1/J, and the terminal behavior is
/// the algebraic branch point it reaches at finite radius. The window data
/// pins the location through the 1/f' line exactly as in the logarithmic
/// case; the coefficient follows from integrating d(ln|1/f'|)/df = -J(f)
/// down to f = 0 with the settled part of J frozen, which gives
///
///   |c0|^n = n |f_end|^(n-1) exp(-P f_end) / |1/f'_end|,
///
/// P = J + (n-1)/f the settled coefficient. The exponential makes this an
/// order-of-magnitude connection estimate (it can round to infinity); its
/// sign is exact and is what membership checks consume.
fn fit_transient_algebraic(
    p: &ModelParams,
    window: &[State],
    dir: f64,
    j_med: f64,
) -> Result<SingularityReport> {
    let r: Vec<f64> = window.iter().map(|s| s.r).collect();
    let inv_fp: Vec<f64> = window.iter().map(|s| 1.0 / s.fp).collect();
    let last = window[window.len() - 1];
    let (_, j_vals) = indicator_values(p, window)?;

    let (xm, ym, slope) = centered_line(&r, &inv_fp)?;
    if slope == 0.0 {
        return Err(Error::InconsistentBehavior("1/f' shows no linear trend in r".into()));
    }
    let r0 = xm - ym / slope;
    if (r0 - last.r) * dir <= 0.0 {
        return Err(Error::InconsistentBehavior(format!(
            "fitted branch location {r0} lies behind the trajectory end {}",
            last.r
        )));
    }

    // The settled J must match the local coefficient of the equation at the
    // fitted location; a tail that merely drifts slowly fails this.
    let f_med = median(&window.iter().map(|s| s.f).collect::<Vec<_>>());
    let p_law = p.kappa * r0 / p.nf() - p.lambda * r0.powf(1.0 - p.nf());
    let j_law = p_law - (p.nf() - 1.0) / f_med;
    let law_dev = (j_med - j_law).abs() / j_law.abs().max(1e-300);
    if law_dev > SPREAD_ACCEPT {
        return Err(Error::InconsistentBehavior(format!(
            "settled J = {j_med:.6e} deviates from the local coefficient {j_law:.6e} \
             by {law_dev:.2e}"
        )));
    }

    let p_settled = j_med + (p.nf() - 1.0) / f_med;
    let u_end = 1.0 / last.fp;
    let ln_c0n =
        p.nf().ln() + (p.nf() - 1.0) * last.f.abs().ln() - u_end.abs().ln() - p_settled * last.f;
    let c0 = f_med.signum() * (ln_c0n / p.nf()).exp();

    let misfit: Vec<f64> =
        r.iter().zip(&inv_fp).map(|(ri, yi)| yi - (ym + slope * (ri - xm))).collect();
    let scale = inv_fp.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
    let fit_residual = rms(&misfit) / scale;

    let w: Vec<f64> = r.iter().map(|ri| 1.0 / (ri - r0).abs().ln()).collect();
    let indicator_limit = extrapolate_limit(&w, &j_vals)?;

    Ok(SingularityReport {
        kind: BranchKind::Algebraic { r0, c0 },
        indicator_limit,
        fit_residual,
        chat: None,
        chat_law_deviation: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::{integrate, IntegratorConfig, Termination};
    use crate::model::exact_lambda0;
    use crate::series::{branch_series_eval, branch_series_eval_above};

    fn params(n: u32, kappa: f64, lambda: f64) -> ModelParams {
        ModelParams::new(n, kappa, lambda).unwrap()
    }

    /// Trajectory of 40 exact branch-series samples approaching r0 from the
    /// given side, geometrically spaced from s = 1e-3 down to ~6e-8.
    fn synthetic_branch(p: &ModelParams, kind: &BranchKind, from_below: bool) -> Trajectory {
        let r0 = kind.r0();
        let samples: Vec<State> = (0..40)
            .map(|k| {
                let s = 1e-3 * 0.78f64.powi(k);
                if from_below {
                    let r = r0 - s;
                    let (f, fp) = branch_series_eval(p, kind, r).unwrap();
                    State::new(r, f, fp)
                } else {
                    let r = r0 + s;
                    let (f, fp) = branch_series_eval_above(p, kind, r).unwrap();
                    State::new(r, f, fp)
                }
            })
            .collect();
        let r_last = samples[samples.len() - 1].r;
        Trajectory::from_samples(*p, samples, Termination::StepCollapse { r: r_last }).unwrap()
    }

    #[test]
    fn algebraic_calibration_on_synthetic_data() {
        for n in 2..=5u32 {
            for (c0, lambda, from_below) in
                [(1.3, 1.0, true), (-0.8, -1.0, true), (1.3, 1.0, false)]
            {
                let p = params(n, 1.0, lambda);
                let kind = BranchKind::Algebraic { r0: 0.75, c0 };
                let traj = synthetic_branch(&p, &kind, from_below);
                let report = classify_branch(&traj).unwrap();
                let limit = 1.0 - p.nf();
                match report.kind {
                    BranchKind::Algebraic { r0, c0: c0_est } => {
                        assert!((r0 - 0.75).abs() <= 1e-3, "n = {n}, c0 = {c0}: r0 = {r0}");
                        assert!(
                            (c0_est - c0).abs() / c0.abs() <= 1e-2,
                            "n = {n}: c0 = {c0_est} vs {c0}"
                        );
                    }
                    other => panic!("n = {n}: expected algebraic, got {other:?}"),
                }
                assert!(
                    (report.indicator_limit - limit).abs() <= 0.02 * limit.abs(),
                    "n = {n}, c0 = {c0}, below = {from_below}: I limit {} vs {limit}",
                    report.indicator_limit
                );
            }
        }
    }

    #[test]
    fn logarithmic_calibration_on_synthetic_data() {
        for n in 2..=5u32 {
            for (lambda, from_below) in [(1.0, true), (-1.0, true), (1.0, false)] {
                let p = params(n, 1.0, lambda);
                let kind = BranchKind::Logarithmic { r0: 0.75 };
                let chat_true = log_coefficient(&p, 0.75).unwrap();
                let traj = synthetic_branch(&p, &kind, from_below);
                let report = classify_branch(&traj).unwrap();
                match report.kind {
                    BranchKind::Logarithmic { r0 } => {
                        assert!((r0 - 0.75).abs() <= 1e-3, "n = {n}: r0 = {r0}");
                    }
                    other => panic!("n = {n}: expected logarithmic, got {other:?}"),
                }
                let chat = report.chat.unwrap();
                assert!(
                    (chat - chat_true).abs() / chat_true.abs() <= 1e-2,
                    "n = {n}, lambda = {lambda}: chat = {chat} vs {chat_true}"
                );
                assert!(
                    report.chat_law_deviation.unwrap() <= 1e-2,
                    "n = {n}: law deviation {}",
                    report.chat_law_deviation.unwrap()
                );
            }
        }
    }

    #[test]
    fn integrated_blow_up_reads_as_logarithmic_with_negative_chat() {
        let p = params(3, 1.0, 1.0);
        let cfg = IntegratorConfig::default();
        let traj = integrate(&p, State::new(0.1, 1.0, 1.0), 10.0, &cfg).unwrap();
        assert!(traj.termination.is_singular());
        let report = classify_branch(&traj).unwrap();
        let chat = report.chat.expect("logarithmic branch expected");
        assert!(chat < 0.0, "chat = {chat}");
        assert!(
            report.chat_law_deviation.unwrap() <= 0.05,
            "law deviation {}",
            report.chat_law_deviation.unwrap()
        );
        let r0 = report.kind.r0();
        let r_last = traj.r_end();
        assert!(r0 >= r_last && r0 < r_last * 1.01, "r0 = {r0} vs end {r_last}");
    }

    #[test]
    fn smooth_tails_are_rejected_as_unclassifiable() {
        let p = params(2, 1.0, 0.0);
        let samples: Vec<State> = (0..40)
            .map(|k| {
                let r = 1.0 + 0.05 * k as f64;
                let (f, fp) = exact_lambda0(&p, r).unwrap();
                State::new(r, f, fp)
            })
            .collect();
        let traj =
            Trajectory::from_samples(p, samples, Termination::StepCollapse { r: 2.95 }).unwrap();
        assert!(matches!(classify_branch(&traj), Err(Error::UnclassifiedBranch { .. })));
    }

    #[test]
    fn non_singular_terminations_are_rejected() {
        let p = params(2, 1.0, 0.0);
        let cfg = IntegratorConfig::default();
        let (f, fp) = exact_lambda0(&p, 0.5).unwrap();
        let traj = integrate(&p, State::new(0.5, f, fp), 5.0, &cfg).unwrap();
        assert!(matches!(classify_branch(&traj), Err(Error::InconsistentBehavior(_))));
    }

    #[test]
    fn short_tails_are_rejected() {
        let p = params(3, 1.0, 1.0);
        let kind = BranchKind::Algebraic { r0: 0.75, c0: 1.0 };
        let samples: Vec<State> = (0..10)
            .map(|k| {
                let r = 0.75 - 1e-3 * 0.78f64.powi(k);
                let (f, fp) = branch_series_eval(&p, &kind, r).unwrap();
                State::new(r, f, fp)
            })
            .collect();
        let traj =
            Trajectory::from_samples(p, samples, Termination::StepCollapse { r: 0.7499 }).unwrap();
        assert!(matches!(classify_branch(&traj), Err(Error::BadWindow(_))));
    }
}
