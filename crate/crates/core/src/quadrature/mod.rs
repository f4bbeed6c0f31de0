//! Double-exponential quadrature on `[0, 1]` and `[0, inf)` for integrands
//! with algebraic endpoint behavior, and the beta-type integral checks.

mod beta;

pub use beta::{
    check_beta, check_curious_beta, check_curious_beta_a0, check_curious_beta_c0, check_curious_beta_diag,
    check_curious_beta_m, check_curious_beta_m_limit, check_curious_beta_succ, check_erdelyi, check_erdelyi_to_c0,
    check_family, classical_value, family_request, halfline_transform_check, large_parameter_trend, BetaFamilyParams,
    BetaSelector, ErdelyiParams, FamilyIntegral, ARGUMENT_MARGIN, CLASSICAL_TOL, CONSISTENCY_TOL, DENOMINATOR_MARGIN,
    EULER_TOL, HALFLINE_TOL, LARGE_SURROGATES, LIMIT_TOL,
};

use std::f64::consts::FRAC_PI_2;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::sum::NeumaierSum;

/// Target for the discarded tails of the transformed integrand.
const TAIL_EPS: f64 = 1e-18;
/// Smallest node distance from an endpoint that is still evaluated.
const MIN_ENDPOINT_DISTANCE: f64 = 1e-300;

/// An integrand on `(0, 1)` receiving `t` and `1 - t`, both computed without cancellation.
pub type Integrand<'a> = dyn Fn(f64, f64) -> f64 + Sync + 'a;

/// One integral over `[0, 1]`.
pub struct QuadratureRequest<'a> {
    pub integrand: &'a Integrand<'a>,
    /// `(p0, p1)` with the integrand behaving like `t^p0` at 0 and `(1-t)^p1` at 1.
    pub endpoint_exponents: (f64, f64),
    /// Relative agreement required between successive refinement levels.
    pub tol: f64,
    pub max_refinement: usize,
}

impl<'a> QuadratureRequest<'a> {
    pub fn new(integrand: &'a Integrand<'a>, endpoint_exponents: (f64, f64)) -> Self {
        QuadratureRequest { integrand, endpoint_exponents, tol: 1e-12, max_refinement: 10 }
    }
}

/// Result of a converged quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureValue {
    pub value: f64,
    /// Difference between the last two refinement levels.
    pub error: f64,
    pub levels: usize,
    pub evaluations: usize,
}

/// Range `u` must cover so that `x^(1+p) * cosh`-type tails drop below `TAIL_EPS`
/// when `x = exp(-scale * sinh u)`.
fn u_limit(p: f64, scale: f64) -> Result<f64> {
    if !(p > -1.0) {
        return Err(Error::Domain(format!("endpoint exponent {p} is not integrable")));
    }
    let need = -TAIL_EPS.ln() / (1.0 + p) / scale;
    Ok(need.asinh() + 0.5)
}

/// Adds one transformed node to the running sum.
fn visit<F: Fn(f64) -> Option<f64>>(node: &F, u: f64, acc: &mut NeumaierSum, estimate: f64) -> Result<()> {
    match node(u) {
        Some(v) if v.is_finite() => {
            acc.add(v);
            Ok(())
        }
        Some(_) => Err(Error::Quadrature { reason: format!("non-finite integrand at u = {u}"), estimate }),
        None => Ok(()),
    }
}

/// Trapezoidal sums of `node(u)` on `[-lo, hi]`, halving the step until two
/// levels agree to `tol` relative to the value.
fn refine<F: Fn(f64) -> Option<f64>>(
    node: F,
    lo: f64,
    hi: f64,
    tol: f64,
    max_refinement: usize,
) -> Result<QuadratureValue> {
    let mut h = 0.5;
    let mut acc = NeumaierSum::new();
    let n_lo = (lo / h).ceil() as i64;
    let n_hi = (hi / h).ceil() as i64;
    for j in -n_lo..=n_hi {
        visit(&node, j as f64 * h, &mut acc, f64::NAN)?;
    }
    let mut evaluations = (n_lo + n_hi + 1) as usize;
    let mut prev = h * acc.value();
    for level in 1..=max_refinement {
        h *= 0.5;
        let n_lo = (lo / h).ceil() as i64;
        let n_hi = (hi / h).ceil() as i64;
        // Only the odd multiples of the new step are new nodes.
        let mut j = if n_lo % 2 == 0 { -n_lo + 1 } else { -n_lo };
        while j <= n_hi {
            visit(&node, j as f64 * h, &mut acc, prev)?;
            evaluations += 1;
            j += 2;
        }
        let value = h * acc.value();
        let error = (value - prev).abs();
        if level >= 2 && (error <= tol * value.abs().max(f64::MIN_POSITIVE) || value == prev) {
            return Ok(QuadratureValue { value, error, levels: level, evaluations });
        }
        prev = value;
    }
    Err(Error::Quadrature { reason: format!("no agreement after {max_refinement} refinements"), estimate: prev })
}

/// Tanh-sinh quadrature on `[0, 1]` in the form `t = 1 / (1 + exp(-pi sinh u))`.
pub fn integrate(req: &QuadratureRequest<'_>) -> Result<QuadratureValue> {
    let (p0, p1) = req.endpoint_exponents;
    let lo = u_limit(p0, PI)?;
    let hi = u_limit(p1, PI)?;
    let f = req.integrand;
    refine(
        |u| {
            let v = PI * u.sinh();
            let t = 1.0 / (1.0 + (-v).exp());
            let s = 1.0 / (1.0 + v.exp());
            if t < MIN_ENDPOINT_DISTANCE || s < MIN_ENDPOINT_DISTANCE {
                return None;
            }
            Some(f(t, s) * t * s * PI * u.cosh())
        },
        lo,
        hi,
        req.tol,
        req.max_refinement,
    )
}

/// The same integral after `t = s / (s + 1)`, taken over `s` in `[0, inf)`
/// with the exp-sinh map `s = exp(pi/2 sinh u)`.
pub fn integrate_halfline(req: &QuadratureRequest<'_>) -> Result<QuadratureValue> {
    let (p0, p1) = req.endpoint_exponents;
    let lo = u_limit(p0, FRAC_PI_2)?;
    // g(s) ~ s^(-p1 - 2) at infinity, so s * g(s) decays like s^-(1 + p1).
    let hi = u_limit(p1, FRAC_PI_2)?;
    let f = req.integrand;
    refine(
        |u| {
            let s = (FRAC_PI_2 * u.sinh()).exp();
            if !(s > MIN_ENDPOINT_DISTANCE) || !s.is_finite() {
                return None;
            }
            let inv = 1.0 / (1.0 + s);
            let t = s * inv;
            if inv < MIN_ENDPOINT_DISTANCE {
                return None;
            }
            let g = f(t, inv) * inv * inv;
            Some(g * s * FRAC_PI_2 * u.cosh())
        },
        lo,
        hi,
        req.tol,
        req.max_refinement,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::gamma_ratio;

    #[test]
    fn constant_and_singular_examples() {
        let one = |_: f64, _: f64| 1.0;
        let v = integrate(&QuadratureRequest::new(&one, (0.0, 0.0))).unwrap();
        assert!((v.value - 1.0).abs() < 1e-14);
        let inv_sqrt = |t: f64, _: f64| t.powf(-0.5);
        let v = integrate(&QuadratureRequest::new(&inv_sqrt, (-0.5, 0.0))).unwrap();
        assert!((v.value - 2.0).abs() < 1e-13, "{v:?}");
        let beta = |t: f64, s: f64| t.powf(0.2) * s.powf(2.4);
        let v = integrate(&QuadratureRequest::new(&beta, (0.2, 2.4))).unwrap();
        let exact = gamma_ratio(&[1.2, 3.4], &[4.6]).unwrap();
        assert!(((v.value - exact) / exact).abs() < 1e-13, "{v:?} vs {exact}");
    }

    #[test]
    fn strong_endpoint_singularities() {
        let f = |t: f64, s: f64| t.powf(-0.8) * s.powf(-0.7);
        let v = integrate(&QuadratureRequest::new(&f, (-0.8, -0.7))).unwrap();
        let exact = gamma_ratio(&[0.2, 0.3], &[0.5]).unwrap();
        assert!(((v.value - exact) / exact).abs() < 1e-12, "{v:?} vs {exact}");
    }

    #[test]
    fn error_estimate_shrinks_with_refinement() {
        let f = |t: f64, s: f64| t.powf(0.5) * s.powf(1.5) * (1.0 + t * t).recip();
        let mut last = f64::INFINITY;
        for tol in [1e-4, 1e-8, 1e-12] {
            let mut req = QuadratureRequest::new(&f, (0.5, 1.5));
            req.tol = tol;
            let v = integrate(&req).unwrap();
            assert!(v.error <= last);
            last = v.error;
        }
    }

    #[test]
    fn halfline_matches_unit_interval() {
        let f = |t: f64, s: f64| t * s * s;
        let req = QuadratureRequest::new(&f, (1.0, 2.0));
        let a = integrate(&req).unwrap().value;
        let b = integrate_halfline(&req).unwrap().value;
        assert!((a - 1.0 / 12.0).abs() < 1e-14 && (b - 1.0 / 12.0).abs() < 1e-12, "{a} {b}");
        let zero = |_: f64, _: f64| 0.0;
        assert_eq!(integrate_halfline(&QuadratureRequest::new(&zero, (0.0, 0.0))).unwrap().value, 0.0);
    }

    #[test]
    fn rejects_nonintegrable_exponent_and_nan() {
        let f = |t: f64, _: f64| 1.0 / t;
        assert!(integrate(&QuadratureRequest::new(&f, (-1.0, 0.0))).is_err());
        let nan = |_: f64, _: f64| f64::NAN;
        assert!(matches!(integrate(&QuadratureRequest::new(&nan, (0.0, 0.0))), Err(Error::Quadrature { .. })));
    }
}
