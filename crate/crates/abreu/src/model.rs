//! The reduced similarity ODE and its closed-form oracles.
//!
//! A rotationally invariant potential g(|x|) on R^n turns Abreu's equation
//! sum_jk d_j d_k g^jk = -kappa into a second-order ODE for f(r) = g'(r):
//!
//! ```text
//! f'' = (kappa/n r - lambda r^(1-n) - (n-1)/f) f'^2 + (n-1)/r f'
//! ```
//!
//! where lambda is the constant of the first integration of the third-order
//! reduction. The same equation can be written as a logarithmic derivative,
//!
//! ```text
//! d/dr log(f^(n-1) f' / r^(n-1)) = (kappa/n r - lambda r^(1-n)) f'
//! ```
//!
//! and both forms are implemented independently so they can be checked
//! against each other. The first integral of the third-order form,
//!
//! ```text
//! A'/r + r B' + (n+1) B = lambda r^(-n) - kappa/n,   A = r/f,  B = 1/(r^2 f') - 1/(r f)
//! ```
//!
//! gives a third independent route; [`first_integral_residual`] evaluates it
//! with f'' supplied by [`rhs_second_order`] and must vanish to rounding.
//!
//! For n = 1 the singular terms (n-1)/f and (n-1)/r drop out identically, so
//! the equation is regular through r = 0 and f = 0; domain checks are
//! correspondingly relaxed in that dimension.

use crate::integrate::Trajectory;
use crate::{Error, Result};

/// Reduction parameters: dimension n, curvature constant kappa, and the
/// first-integration constant lambda.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub n: u32,
    pub kappa: f64,
    pub lambda: f64,
}

impl ModelParams {
    /// Validated constructor: n >= 1 and finite coefficients.
    pub fn new(n: u32, kappa: f64, lambda: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("dimension n must be >= 1".into()));
        }
        if !kappa.is_finite() || !lambda.is_finite() {
            return Err(Error::InvalidParams(format!(
                "kappa and lambda must be finite, got kappa = {kappa}, lambda = {lambda}"
            )));
        }
        Ok(ModelParams { n, kappa, lambda })
    }

    /// Dimension as a float, for use in coefficients.
    pub fn nf(&self) -> f64 {
        f64::from(self.n)
    }

    /// r^(1-n), the weight of the lambda term in the second-order form.
    pub fn r_pow_1mn(&self, r: f64) -> f64 {
        r.powi(1 - self.n as i32)
    }

    /// Rejects states where the equation is singular. For n >= 2 this means
    /// r <= 0 or f = 0; for n = 1 the singular terms vanish identically and
    /// any finite state is admissible.
    pub fn check_state(&self, s: &State) -> Result<()> {
        if !(s.r.is_finite() && s.f.is_finite() && s.fp.is_finite()) {
            return Err(Error::BadInitialState(format!(
                "non-finite state (r = {}, f = {}, f' = {})",
                s.r, s.f, s.fp
            )));
        }
        if self.n >= 2 {
            if s.r <= 0.0 {
                return Err(Error::NonPositiveRadius { r: s.r });
            }
            if s.f == 0.0 {
                return Err(Error::ZeroF { r: s.r });
            }
        }
        Ok(())
    }
}

/// A point on a solution: radius r together with f(r) and f'(r).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub r: f64,
    pub f: f64,
    pub fp: f64,
}

impl State {
    pub fn new(r: f64, f: f64, fp: f64) -> Self {
        State { r, f, fp }
    }
}

/// f'' from the second-order form of the reduced equation.
pub fn rhs_second_order(p: &ModelParams, s: &State) -> Result<f64> {
    p.check_state(s)?;
    let nf = p.nf();
    let mut coef = p.kappa / nf * s.r - p.lambda * p.r_pow_1mn(s.r);
    if p.n >= 2 {
        coef -= (nf - 1.0) / s.f;
    }
    let mut fpp = coef * s.fp * s.fp;
    if p.n >= 2 {
        fpp += (nf - 1.0) / s.r * s.fp;
    }
    Ok(fpp)
}

/// f'' solved out of the logarithmic-derivative form. Requires f' != 0
/// (the log form differentiates log f'). Agrees with [`rhs_second_order`]
/// identically; the two expressions are kept separate as a cross-check.
pub fn rhs_log_form(p: &ModelParams, s: &State) -> Result<f64> {
    p.check_state(s)?;
    if s.fp == 0.0 {
        return Err(Error::ZeroFPrime { r: s.r, context: "log form differentiates log f'" });
    }
    let nf = p.nf();
    let mut bracket = (p.kappa / nf * s.r - p.lambda * p.r_pow_1mn(s.r)) * s.fp;
    if p.n >= 2 {
        bracket += (nf - 1.0) / s.r - (nf - 1.0) * s.fp / s.f;
    }
    Ok(s.fp * bracket)
}

/// The first-integral expression A'/r + r B' + (n+1) B with f'' supplied by
/// the caller. On solutions this equals lambda r^(-n) - kappa/n.
pub fn first_integral_lhs(p: &ModelParams, s: &State, fpp: f64) -> Result<f64> {
    check_first_integral_domain(p, s)?;
    let (r, f, fp) = (s.r, s.f, s.fp);
    let a_prime = 1.0 / f - r * fp / (f * f);
    let b = 1.0 / (r * r * fp) - 1.0 / (r * f);
    let b_prime =
        -2.0 / (r * r * r * fp) - fpp / (r * r * fp * fp) + 1.0 / (r * r * f) + fp / (r * f * f);
    Ok(a_prime / r + r * b_prime + (p.nf() + 1.0) * b)
}

/// Residual of the first integral with f'' taken from [`rhs_second_order`]:
///
/// ```text
/// A'/r + r B' + (n+1) B - lambda r^(-n) + kappa/n
/// ```
///
/// Zero (to rounding) for any admissible state, because the second-order
/// form is exactly the derivative reduction of the first integral; a nonzero
/// value signals an implementation inconsistency between the two routes.
pub fn first_integral_residual(p: &ModelParams, s: &State) -> Result<f64> {
    let fpp = rhs_second_order(p, s)?;
    first_integral_residual_with(p, s, fpp)
}

/// First-integral residual with an explicitly supplied f''. Used to measure
/// how well truncated series states satisfy the integrated equation.
pub fn first_integral_residual_with(p: &ModelParams, s: &State, fpp: f64) -> Result<f64> {
    let lhs = first_integral_lhs(p, s, fpp)?;
    Ok(lhs - p.lambda * s.r.powi(-(p.n as i32)) + p.kappa / p.nf())
}

/// First-integral residual normalized by the largest participating term, so
/// the result is meaningful even where individual terms grow like 1/f^2.
pub fn first_integral_residual_scaled(p: &ModelParams, s: &State) -> Result<f64> {
    let fpp = rhs_second_order(p, s)?;
    check_first_integral_domain(p, s)?;
    let (r, f, fp) = (s.r, s.f, s.fp);
    let a_prime = 1.0 / f - r * fp / (f * f);
    let b = 1.0 / (r * r * fp) - 1.0 / (r * f);
    let b_prime =
        -2.0 / (r * r * r * fp) - fpp / (r * r * fp * fp) + 1.0 / (r * r * f) + fp / (r * f * f);
    let terms = [
        a_prime / r,
        r * b_prime,
        (p.nf() + 1.0) * b,
        -p.lambda * r.powi(-(p.n as i32)),
        p.kappa / p.nf(),
    ];
    let scale = terms.iter().fold(0.0f64, |acc, t| acc.max(t.abs())).max(1e-300);
    Ok(terms.iter().sum::<f64>() / scale)
}

fn check_first_integral_domain(p: &ModelParams, s: &State) -> Result<()> {
    p.check_state(s)?;
    if s.r == 0.0 {
        return Err(Error::NonPositiveRadius { r: s.r });
    }
    if s.f == 0.0 {
        return Err(Error::ZeroF { r: s.r });
    }
    if s.fp == 0.0 {
        return Err(Error::ZeroFPrime { r: s.r, context: "first integral divides by f'" });
    }
    Ok(())
}

/// Residual of the third-order reduction (n + r d/dr)(A'/r + r B' + (n+1) B)
/// = -kappa, evaluated along a trajectory. The inner expression is built
/// from the dense output (with f'' taken as the exact derivative of the
/// interpolated f') and differentiated with a 5-point central stencil of
/// width h = 1e-3 r.
pub fn third_order_residual(p: &ModelParams, traj: &Trajectory, r: f64) -> Result<f64> {
    if r <= 0.0 {
        return Err(Error::NonPositiveRadius { r });
    }
    let h = 1e-3 * r;
    let inner = |x: f64| -> Result<f64> {
        let (f, fp, fpp) = traj.eval2(x)?;
        first_integral_lhs(p, &State::new(x, f, fp), fpp)
    };
    let em2 = inner(r - 2.0 * h)?;
    let em1 = inner(r - h)?;
    let e0 = inner(r)?;
    let ep1 = inner(r + h)?;
    let ep2 = inner(r + 2.0 * h)?;
    let de = (em2 - 8.0 * em1 + 8.0 * ep1 - ep2) / (12.0 * h);
    Ok(p.nf() * e0 + r * de + p.kappa)
}

/// The exact decaying solution available when lambda = 0:
///
/// ```text
/// f = 2 n^2 / (kappa r),   f' = -2 n^2 / (kappa r^2)
/// ```
pub fn exact_lambda0(p: &ModelParams, r: f64) -> Result<(f64, f64)> {
    if p.lambda != 0.0 {
        return Err(Error::InconsistentBehavior(format!(
            "exact decaying solution requires lambda = 0, got lambda = {}",
            p.lambda
        )));
    }
    if p.kappa == 0.0 {
        return Err(Error::InvalidParams("exact decaying solution requires kappa != 0".into()));
    }
    if r == 0.0 || (p.n >= 2 && r < 0.0) {
        return Err(Error::NonPositiveRadius { r });
    }
    let c = 2.0 * p.nf() * p.nf() / p.kappa;
    Ok((c / r, -c / (r * r)))
}

/// The general n = 1 solution in closed form, parametrized by the constants
/// rho > 0, alpha, beta:
///
/// ```text
/// f  = (1/rho) log((rho - lambda + kappa r) / (rho + lambda - kappa r)) + alpha
/// f' = 2 kappa / (rho^2 - (lambda - kappa r)^2)
/// g  = (r - r_minus) log(r - r_minus)/rho + (r_plus - r) log(r_plus - r)/rho + alpha r + beta
/// ```
///
/// valid on the open interval (r_minus, r_plus) with r_pm = (lambda +- rho)/kappa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormN1 {
    pub rho: f64,
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
    pub lambda: f64,
}

impl ClosedFormN1 {
    /// Validated constructor: rho > 0, kappa > 0, finite constants.
    pub fn new(rho: f64, alpha: f64, beta: f64, kappa: f64, lambda: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidParams(format!("rho must be positive, got {rho}")));
        }
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "the two-log potential requires kappa > 0, got {kappa}"
            )));
        }
        if !(alpha.is_finite() && beta.is_finite() && lambda.is_finite()) {
            return Err(Error::InvalidParams("alpha, beta, lambda must be finite".into()));
        }
        Ok(ClosedFormN1 { rho, alpha, beta, kappa, lambda })
    }

    /// Left endpoint (lambda - rho)/kappa of the validity interval.
    pub fn r_minus(&self) -> f64 {
        (self.lambda - self.rho) / self.kappa
    }

    /// Right endpoint (lambda + rho)/kappa of the validity interval.
    pub fn r_plus(&self) -> f64 {
        (self.lambda + self.rho) / self.kappa
    }

    /// The associated model parameters (n = 1).
    pub fn params(&self) -> ModelParams {
        ModelParams { n: 1, kappa: self.kappa, lambda: self.lambda }
    }

    fn check_interior(&self, r: f64) -> Result<(f64, f64)> {
        let lo = self.rho - self.lambda + self.kappa * r;
        let hi = self.rho + self.lambda - self.kappa * r;
        if lo <= 0.0 || hi <= 0.0 {
            return Err(Error::OutOfDomain { r, lo: self.r_minus(), hi: self.r_plus() });
        }
        Ok((lo, hi))
    }

    /// (f, f') at radius r in (r_minus, r_plus).
    pub fn eval(&self, r: f64) -> Result<(f64, f64)> {
        let (lo, hi) = self.check_interior(r)?;
        let u = self.lambda - self.kappa * r;
        let f = (lo / hi).ln() / self.rho + self.alpha;
        let fp = 2.0 * self.kappa / (self.rho * self.rho - u * u);
        Ok((f, fp))
    }

    /// State at radius r, for seeding integrations.
    pub fn state(&self, r: f64) -> Result<State> {
        let (f, fp) = self.eval(r)?;
        Ok(State::new(r, f, fp))
    }

    /// The potential g(r) itself (two-log form).
    pub fn eval_g(&self, r: f64) -> Result<f64> {
        self.check_interior(r)?;
        let dm = r - self.r_minus();
        let dp = self.r_plus() - r;
        Ok(dm * dm.ln() / self.rho + dp * dp.ln() / self.rho + self.alpha * r + self.beta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(n: u32, kappa: f64, lambda: f64) -> ModelParams {
        ModelParams::new(n, kappa, lambda).unwrap()
    }

    #[test]
    fn rhs_matches_exact_solution_values() {
        // On f = 2n^2/(kappa r) the second derivative is 4n^2/(kappa r^3).
        let p = params(2, 1.0, 0.0);
        let fpp = rhs_second_order(&p, &State::new(1.0, 8.0, -8.0)).unwrap();
        assert!((fpp - 16.0).abs() < 1e-12, "got {fpp}");

        let p1 = params(1, 1.0, 0.0);
        let s = State::new(0.5, 3.0f64.ln(), 8.0 / 3.0);
        let fpp = rhs_second_order(&p1, &s).unwrap();
        assert!((fpp - 32.0 / 9.0).abs() < 1e-12, "got {fpp}");
    }

    #[test]
    fn rhs_vanishes_with_stationary_f() {
        let p = params(2, 1.0, 0.0);
        let fpp = rhs_second_order(&p, &State::new(1.0, 3.0, 0.0)).unwrap();
        assert_eq!(fpp, 0.0);
    }

    #[test]
    fn rhs_domain_errors() {
        let p = params(3, 1.0, 1.0);
        assert!(matches!(
            rhs_second_order(&p, &State::new(-1.0, 1.0, 1.0)),
            Err(Error::NonPositiveRadius { .. })
        ));
        assert!(matches!(
            rhs_second_order(&p, &State::new(1.0, 0.0, 1.0)),
            Err(Error::ZeroF { .. })
        ));
        // n = 1 is regular through r <= 0 and f = 0.
        let p1 = params(1, 1.0, 0.5);
        assert!(rhs_second_order(&p1, &State::new(-0.3, 0.0, 2.0)).is_ok());
    }

    #[test]
    fn log_form_agrees_with_second_order_form() {
        let cases = [
            (params(2, 1.0, 0.0), State::new(1.0, 8.0, -8.0)),
            (params(3, 1.0, 1.0), State::new(0.7, -2.0, 1.5)),
            (params(5, 0.5, -2.0), State::new(2.0, 0.3, -0.1)),
            (params(1, 1.0, 0.0), State::new(0.5, 3.0f64.ln(), 8.0 / 3.0)),
        ];
        for (p, s) in cases {
            let a = rhs_second_order(&p, &s).unwrap();
            let b = rhs_log_form(&p, &s).unwrap();
            let scale = a.abs().max(b.abs()).max(1.0);
            assert!((a - b).abs() / scale < 1e-13, "n = {}: {a} vs {b}", p.n);
        }
    }

    #[test]
    fn log_form_rejects_stationary_f() {
        let p = params(2, 1.0, 0.0);
        assert!(matches!(
            rhs_log_form(&p, &State::new(1.0, 3.0, 0.0)),
            Err(Error::ZeroFPrime { .. })
        ));
    }

    #[test]
    fn first_integral_residual_vanishes() {
        let p = params(2, 1.0, 0.0);
        let res = first_integral_residual(&p, &State::new(1.0, 8.0, -8.0)).unwrap();
        assert!(res.abs() < 1e-12, "got {res}");

        let p = params(3, 2.0, -1.5);
        let res = first_integral_residual(&p, &State::new(0.3, -4.0, 2.0)).unwrap();
        assert!(res.abs() < 1e-9, "got {res}");
    }

    #[test]
    fn exact_lambda0_frozen_values() {
        let p = params(2, 1.0, 0.0);
        assert_eq!(exact_lambda0(&p, 1.0).unwrap(), (8.0, -8.0));
        let p = params(3, 1.0, 0.0);
        let (f, fp) = exact_lambda0(&p, 18.0).unwrap();
        assert!((f - 1.0).abs() < 1e-15);
        assert!((fp + 1.0 / 18.0).abs() < 1e-15);
        let p = params(1, 2.0, 0.0);
        assert_eq!(exact_lambda0(&p, 1.0).unwrap(), (1.0, -1.0));
    }

    #[test]
    fn exact_lambda0_satisfies_the_equation() {
        for n in [1u32, 2, 3, 5] {
            let p = params(n, 1.3, 0.0);
            for r in [0.3, 1.0, 7.5] {
                let (f, fp) = exact_lambda0(&p, r).unwrap();
                let fpp = rhs_second_order(&p, &State::new(r, f, fp)).unwrap();
                let expect = 4.0 * p.nf() * p.nf() / (p.kappa * r * r * r);
                assert!((fpp - expect).abs() / expect.abs() < 1e-13, "n = {n}, r = {r}");
            }
        }
    }

    #[test]
    fn exact_lambda0_requires_lambda_zero() {
        let p = params(2, 1.0, 0.5);
        assert!(matches!(exact_lambda0(&p, 1.0), Err(Error::InconsistentBehavior(_))));
    }

    #[test]
    fn closed_form_n1_frozen_values() {
        let cf = ClosedFormN1::new(1.0, 0.0, 0.0, 1.0, 0.0).unwrap();
        assert_eq!(cf.r_minus(), -1.0);
        assert_eq!(cf.r_plus(), 1.0);
        let (f, fp) = cf.eval(0.0).unwrap();
        assert_eq!(f, 0.0);
        assert_eq!(fp, 2.0);
        let (f, fp) = cf.eval(0.5).unwrap();
        assert!((f - 3.0f64.ln()).abs() < 1e-15);
        assert!((fp - 8.0 / 3.0).abs() < 1e-15);
        // At the interval midpoint r = lambda/kappa the log vanishes and f = alpha.
        let cf = ClosedFormN1::new(2.0, 0.7, 0.0, 1.0, 1.0).unwrap();
        let (f, _) = cf.eval(1.0).unwrap();
        assert!((f - 0.7).abs() < 1e-15);
    }

    #[test]
    fn closed_form_n1_satisfies_the_equation() {
        let cf = ClosedFormN1::new(1.5, 0.3, -0.2, 2.0, 0.5).unwrap();
        let p = cf.params();
        for r in [-0.4, -0.1, 0.2, 0.6, 0.9] {
            let (f, fp) = cf.eval(r).unwrap();
            let fpp = rhs_second_order(&p, &State::new(r, f, fp)).unwrap();
            // Compare against a central difference of the closed-form f'.
            let h = 1e-6;
            let (_, fp_hi) = cf.eval(r + h).unwrap();
            let (_, fp_lo) = cf.eval(r - h).unwrap();
            let fd = (fp_hi - fp_lo) / (2.0 * h);
            assert!((fpp - fd).abs() / fd.abs().max(1.0) < 1e-8, "r = {r}: {fpp} vs {fd}");
        }
    }

    #[test]
    fn closed_form_n1_potential_derivative_is_f() {
        let cf = ClosedFormN1::new(1.0, 0.4, 1.1, 1.0, 0.2).unwrap();
        for r in [-0.5, 0.0, 0.3, 0.8] {
            let (f, _) = cf.eval(r).unwrap();
            let h = 1e-6;
            let gd = (cf.eval_g(r + h).unwrap() - cf.eval_g(r - h).unwrap()) / (2.0 * h);
            assert!((gd - f).abs() < 1e-8, "r = {r}: g' = {gd}, f = {f}");
        }
    }

    #[test]
    fn closed_form_n1_rejects_exterior_points() {
        let cf = ClosedFormN1::new(1.0, 0.0, 0.0, 1.0, 0.0).unwrap();
        assert!(matches!(cf.eval(1.2), Err(Error::OutOfDomain { .. })));
        assert!(matches!(cf.eval(-1.0), Err(Error::OutOfDomain { .. })));
    }

    proptest! {
        // The two right-hand-side routes are the same function wherever both
        // are defined.
        #[test]
        fn prop_rhs_routes_agree(
            n in 1u32..=6,
            kappa in 0.1f64..3.0,
            lambda in -2.0f64..2.0,
            r in 0.05f64..20.0,
            f in prop::sample::select(vec![-10.0, -1.0, -0.2, 0.2, 1.0, 10.0]),
            fp in prop::sample::select(vec![-5.0, -0.5, 0.5, 5.0]),
        ) {
            let p = params(n, kappa, lambda);
            let s = State::new(r, f, fp);
            let a = rhs_second_order(&p, &s).unwrap();
            let b = rhs_log_form(&p, &s).unwrap();
            let scale = a.abs().max(b.abs()).max(1.0);
            prop_assert!((a - b).abs() / scale < 1e-12);
        }

        // The first integral is an exact identity of the second-order form.
        #[test]
        fn prop_first_integral_identity(
            n in 1u32..=6,
            kappa in 0.1f64..3.0,
            lambda in -2.0f64..2.0,
            r in 0.05f64..20.0,
            f in prop::sample::select(vec![-10.0, -1.0, -0.2, 0.2, 1.0, 10.0]),
            fp in prop::sample::select(vec![-5.0, -0.5, 0.5, 5.0]),
        ) {
            let p = params(n, kappa, lambda);
            let res = first_integral_residual_scaled(&p, &State::new(r, f, fp)).unwrap();
            prop_assert!(res.abs() < 1e-12, "scaled residual {res}");
        }
    }
}
