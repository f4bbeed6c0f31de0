//! Beta-type integrals and their gamma-ratio evaluations.

use serde::{Deserialize, Serialize};

use super::{integrate, integrate_halfline, QuadratureRequest, QuadratureValue};
use crate::check::{settle, CheckResult};
use crate::classical::{beta_fn, gamma_ratio, hyp2f1, shifted_factorial};
use crate::error::{Error, Result};
use crate::qcore::TruncationPolicy;

/// Tolerance for the family integrals against their closed forms.
pub const CLASSICAL_TOL: f64 = 1e-7;
/// Tolerance for Euler's integral.
pub const EULER_TOL: f64 = 1e-9;
/// Agreement required between two quadratures of the same value.
pub const CONSISTENCY_TOL: f64 = 1e-8;
/// Agreement required between the unit-interval and half-line quadratures.
pub const HALFLINE_TOL: f64 = 1e-6;
/// Agreement required between a surrogate at 1e8 and the limiting integral.
pub const LIMIT_TOL: f64 = 1e-6;
/// Largest admissible `|z|` for a nonterminating inner `2F1`.
pub const ARGUMENT_MARGIN: f64 = 0.95;
/// Smallest admissible `|factor| / scale` for factors that must not vanish on `[0, 1]`.
pub const DENOMINATOR_MARGIN: f64 = 1e-3;
/// Surrogate magnitudes for parameters sent to infinity.
pub const LARGE_SURROGATES: [f64; 3] = [1e4, 1e6, 1e8];

const QUAD_TOL: f64 = 1e-11;
const QUAD_LEVELS: usize = 9;
const SCREEN_POINTS: usize = 256;

/// Which member of the beta family is integrated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BetaSelector {
    /// `t^(alpha-1) (1-t)^(beta-1)`.
    Euler,
    /// The curious beta integral with parameters `alpha, beta, a, c`.
    Curious,
    /// Its `alpha = beta + 1` case, where the inner series is 1.
    CuriousSucc,
    /// Its `alpha = beta` case, with the extra factor `c - a^2 + t^2`.
    CuriousDiag,
    /// Its `c -> 0` limit, parametrized by `a > 0`.
    CuriousC0,
    /// Its `a = 0` case, parametrized by `c > 1`.
    CuriousA0,
    /// The terminating variant with parameters `beta, a, c, e, m`.
    CuriousM,
    /// Its `c -> inf` limit in `beta, e, m`.
    CuriousMLimit,
}

impl BetaSelector {
    pub const ALL: [BetaSelector; 8] = [
        BetaSelector::Euler,
        BetaSelector::Curious,
        BetaSelector::CuriousSucc,
        BetaSelector::CuriousDiag,
        BetaSelector::CuriousC0,
        BetaSelector::CuriousA0,
        BetaSelector::CuriousM,
        BetaSelector::CuriousMLimit,
    ];
}

/// Parameters of a beta-family integral. Fields a selector does not use are ignored.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaFamilyParams {
    pub selector: BetaSelector,
    pub alpha: f64,
    pub beta: f64,
    pub a: f64,
    pub c: f64,
    pub e: f64,
    pub m: usize,
}

impl BetaFamilyParams {
    fn base(selector: BetaSelector, beta: f64) -> Self {
        BetaFamilyParams { selector, alpha: 0.0, beta, a: 0.0, c: 0.0, e: 0.0, m: 0 }
    }

    pub fn euler(alpha: f64, beta: f64) -> Self {
        BetaFamilyParams { alpha, ..Self::base(BetaSelector::Euler, beta) }
    }

    pub fn curious(alpha: f64, beta: f64, a: f64, c: f64) -> Self {
        BetaFamilyParams { alpha, a, c, ..Self::base(BetaSelector::Curious, beta) }
    }

    pub fn curious_succ(beta: f64, a: f64, c: f64) -> Self {
        BetaFamilyParams { alpha: beta + 1.0, a, c, ..Self::base(BetaSelector::CuriousSucc, beta) }
    }

    pub fn curious_diag(beta: f64, a: f64, c: f64) -> Self {
        BetaFamilyParams { alpha: beta, a, c, ..Self::base(BetaSelector::CuriousDiag, beta) }
    }

    pub fn curious_c0(alpha: f64, beta: f64, a: f64) -> Self {
        BetaFamilyParams { alpha, a, ..Self::base(BetaSelector::CuriousC0, beta) }
    }

    pub fn curious_a0(alpha: f64, beta: f64, c: f64) -> Self {
        BetaFamilyParams { alpha, c, ..Self::base(BetaSelector::CuriousA0, beta) }
    }

    pub fn curious_m(beta: f64, a: f64, c: f64, e: f64, m: usize) -> Self {
        BetaFamilyParams { a, c, e, m, ..Self::base(BetaSelector::CuriousM, beta) }
    }

    pub fn curious_m_limit(beta: f64, m: usize, e: f64) -> Self {
        BetaFamilyParams { e, m, ..Self::base(BetaSelector::CuriousMLimit, beta) }
    }
}

/// `2F1(a, b; c; z)` inside an integrand: a polynomial when the series
/// terminates, otherwise summed per node with the inner policy.
#[derive(Clone, Debug)]
struct Hyp2f1Kernel {
    a: f64,
    b: f64,
    c: f64,
    poly: Option<Vec<f64>>,
}

fn nonpositive_integer(x: f64) -> Option<usize> {
    let r = x.round();
    ((x - r).abs() <= 1e-12 && r <= 0.0).then_some((-r) as usize)
}

impl Hyp2f1Kernel {
    /// `max_arg` bounds `|z|` over the integration path.
    fn new(a: f64, b: f64, c: f64, max_arg: f64) -> Result<Self> {
        let order = match (nonpositive_integer(a), nonpositive_integer(b)) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        };
        match order {
            Some(n) => {
                let mut coeffs = Vec::with_capacity(n + 1);
                let mut term = 1.0;
                coeffs.push(term);
                for k in 0..n {
                    let kf = k as f64;
                    let den = (c + kf) * (kf + 1.0);
                    if (c + kf).abs() < 1e-12 {
                        return Err(Error::ZeroDenominator { context: "inner 2F1 denominator", index: k as i64 });
                    }
                    term *= (a + kf) * (b + kf) / den;
                    coeffs.push(term);
                }
                Ok(Hyp2f1Kernel { a, b, c, poly: Some(coeffs) })
            }
            None => {
                if nonpositive_integer(c).is_some() {
                    return Err(Error::Pole { function: "inner 2F1", at: c });
                }
                if !(max_arg <= ARGUMENT_MARGIN) {
                    return Err(Error::Domain(format!(
                        "inner 2F1 argument reaches {max_arg:.4}, above {ARGUMENT_MARGIN}"
                    )));
                }
                Ok(Hyp2f1Kernel { a, b, c, poly: None })
            }
        }
    }

    fn eval(&self, z: f64) -> f64 {
        match &self.poly {
            Some(coeffs) => coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c),
            None => hyp2f1(self.a, self.b, self.c, z, &TruncationPolicy::inner()).map(|v| v.value).unwrap_or(f64::NAN),
        }
    }
}

fn screen_grid() -> impl Iterator<Item = f64> {
    (0..=SCREEN_POINTS).map(|j| j as f64 / SCREEN_POINTS as f64)
}

fn max_abs_on_path(f: impl Fn(f64) -> f64) -> f64 {
    screen_grid().map(|t| f(t).abs()).fold(0.0, f64::max)
}

fn away_from_zero(value: f64, scale: f64, what: &str) -> Result<()> {
    if value.abs() < DENOMINATOR_MARGIN * scale || !value.is_finite() {
        return Err(Error::Domain(format!("{what} = {value:.3e} is too close to zero on [0, 1]")));
    }
    Ok(())
}

/// The weight `(c-(a+1)^2) (c-a(a+t))^p (c-(a+1)(a+t))^r / (c-(a+t)^2)^(p+r+1)`,
/// evaluated as `pref * r1^p * r2^r` with all three ratios over `D = c-(a+t)^2`.
#[derive(Clone, Copy, Debug)]
struct CuriousWeight {
    a: f64,
    c: f64,
}

impl CuriousWeight {
    fn screened(a: f64, c: f64) -> Result<Self> {
        let scale = 1f64.max(c.abs()).max((a.abs() + 1.0).powi(2));
        let w = CuriousWeight { a, c };
        let d = |t: f64| c - (a + t) * (a + t);
        let mut probe = vec![0.0, 1.0];
        if (0.0..=1.0).contains(&-a) {
            probe.push(-a);
        }
        let signs: Vec<f64> = probe.iter().map(|&t| d(t)).collect();
        if signs.iter().any(|&x| x.signum() != signs[0].signum()) {
            return Err(Error::Domain("c - (a+t)^2 vanishes on [0, 1]".into()));
        }
        for &v in &signs {
            away_from_zero(v, scale, "c - (a+t)^2")?;
        }
        for t in [0.0, 1.0] {
            away_from_zero(c - a * (a + t), scale, "c - a(a+t)")?;
            away_from_zero(c - (a + 1.0) * (a + t), scale, "c - (a+1)(a+t)")?;
            let (_, r1, r2) = w.parts(t);
            if !(r1 > 0.0 && r2 > 0.0) {
                return Err(Error::Domain("weight base is negative on [0, 1]".into()));
            }
        }
        away_from_zero(c - (a + 1.0) * (a + 1.0), scale, "c - (a+1)^2")?;
        Ok(w)
    }

    fn parts(&self, t: f64) -> (f64, f64, f64) {
        let (a, c) = (self.a, self.c);
        let x = a + t;
        let d = c - x * x;
        ((c - (a + 1.0) * (a + 1.0)) / d, (c - a * x) / d, (c - (a + 1.0) * x) / d)
    }

    fn eval(&self, t: f64, p: f64, r: f64) -> f64 {
        let (pref, r1, r2) = self.parts(t);
        pref * r1.powf(p) * r2.powf(r)
    }

    /// The inner argument `(a+t) t / (c - a(a+t))`.
    fn argument(&self, t: f64) -> f64 {
        (self.a + t) * t / (self.c - self.a * (self.a + t))
    }
}

type BoxedIntegrand = Box<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A beta-family integrand with its endpoint behavior and closed-form value.
pub struct FamilyIntegral {
    pub integrand: BoxedIntegrand,
    pub endpoint_exponents: (f64, f64),
    pub closed_form: f64,
}

impl FamilyIntegral {
    pub fn request(&self) -> QuadratureRequest<'_> {
        QuadratureRequest {
            integrand: &*self.integrand,
            endpoint_exponents: self.endpoint_exponents,
            tol: QUAD_TOL,
            max_refinement: QUAD_LEVELS,
        }
    }

    pub fn evaluate(&self) -> Result<QuadratureValue> {
        integrate(&self.request())
    }
}

fn require(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Domain(what.to_string()))
    }
}

fn algebraic(t: f64, s: f64, p0: f64, p1: f64) -> f64 {
    t.powf(p0) * s.powf(p1)
}

/// Builds the integrand, endpoint exponents and closed form for `p`.
pub fn family_request(p: &BetaFamilyParams) -> Result<FamilyIntegral> {
    let BetaFamilyParams { alpha, beta, a, c, e, m, selector } = *p;
    require(beta > 0.0, "beta must be positive")?;
    let half_beta = || gamma_ratio(&[beta, beta], &[2.0 * beta]).map(|g| 0.5 * g);
    let built: (BoxedIntegrand, (f64, f64), f64) = match selector {
        BetaSelector::Euler => {
            require(alpha > 0.0, "alpha must be positive")?;
            let (p0, p1) = (alpha - 1.0, beta - 1.0);
            (Box::new(move |t, s| algebraic(t, s, p0, p1)), (p0, p1), beta_fn(alpha, beta)?)
        }
        BetaSelector::Curious => {
            require(alpha > 0.0, "alpha must be positive")?;
            let w = CuriousWeight::screened(a, c)?;
            let k = Hyp2f1Kernel::new(alpha - beta - 1.0, -beta, alpha, max_abs_on_path(|t| w.argument(t)))?;
            let (p0, p1) = (alpha - 1.0, beta - 1.0);
            let f = move |t: f64, s: f64| w.eval(t, beta, beta - 1.0) * k.eval(w.argument(t)) * algebraic(t, s, p0, p1);
            (Box::new(f), (p0, p1), beta_fn(alpha, beta)?)
        }
        BetaSelector::CuriousSucc => {
            let w = CuriousWeight::screened(a, c)?;
            let f = move |t: f64, s: f64| w.eval(t, beta, beta - 1.0) * algebraic(t, s, beta, beta - 1.0);
            (Box::new(f), (beta, beta - 1.0), half_beta()?)
        }
        BetaSelector::CuriousDiag => {
            let w = CuriousWeight::screened(a, c)?;
            let f = move |t: f64, s: f64| {
                let d = c - (a + t) * (a + t);
                w.eval(t, beta - 1.0, beta - 1.0) * ((c - a * a + t * t) / d) * algebraic(t, s, beta - 1.0, beta - 1.0)
            };
            (Box::new(f), (beta - 1.0, beta - 1.0), gamma_ratio(&[beta, beta], &[2.0 * beta])?)
        }
        BetaSelector::CuriousC0 => {
            require(alpha > 0.0, "alpha must be positive")?;
            require(a > 0.0, "a must be positive")?;
            let k = Hyp2f1Kernel::new(alpha - beta - 1.0, -beta, alpha, 1.0 / a)?;
            let (p0, p1) = (alpha - 1.0, beta - 1.0);
            let f = move |t: f64, s: f64| {
                let x = a + t;
                (a / x).powf(beta) * ((a + 1.0) / x).powf(beta + 1.0) * k.eval(-t / a) * algebraic(t, s, p0, p1)
            };
            (Box::new(f), (p0, p1), beta_fn(alpha, beta)?)
        }
        BetaSelector::CuriousA0 => {
            require(alpha > 0.0, "alpha must be positive")?;
            require(c > 1.0, "c must exceed 1")?;
            away_from_zero(c - 1.0, c, "c - 1")?;
            let k = Hyp2f1Kernel::new(alpha - beta - 1.0, -beta, alpha, 1.0 / c)?;
            let (p0, p1) = (alpha - 1.0, beta - 1.0);
            let f = move |t: f64, s: f64| {
                let d = c - t * t;
                ((c - 1.0) / d)
                    * (c / d).powf(beta)
                    * ((c - t) / d).powf(beta - 1.0)
                    * k.eval(t * t / c)
                    * algebraic(t, s, p0, p1)
            };
            (Box::new(f), (p0, p1), beta_fn(alpha, beta)?)
        }
        BetaSelector::CuriousM | BetaSelector::CuriousMLimit => {
            let mf = m as f64;
            require(beta > mf - 1.0, "beta must exceed m - 1")?;
            require(e < 1.0, "e must be below 1")?;
            away_from_zero(1.0 - e.max(0.0), 1.0, "1 - e t")?;
            let k = Hyp2f1Kernel::new(-beta, -mf, -2.0 * beta, f64::INFINITY)?;
            let scale = (1.0 - e).powi(m as i32);
            let (p0, p1) = (beta - mf, beta - 1.0);
            if selector == BetaSelector::CuriousM {
                let w = CuriousWeight::screened(a, c)?;
                let f = move |t: f64, s: f64| {
                    let (_, r1, _) = w.parts(t);
                    let et = 1.0 - e * t;
                    w.eval(t, beta, beta - 1.0) * k.eval(1.0 / (r1 * et)) * et.powi(m as i32) / scale
                        * algebraic(t, s, p0, p1)
                };
                (Box::new(f), (p0, p1), half_beta()?)
            } else {
                let f = move |t: f64, s: f64| {
                    let et = 1.0 - e * t;
                    k.eval(1.0 / et) * et.powi(m as i32) / scale * algebraic(t, s, p0, p1)
                };
                (Box::new(f), (p0, p1), half_beta()?)
            }
        }
    };
    let (integrand, endpoint_exponents, closed_form) = built;
    Ok(FamilyIntegral { integrand, endpoint_exponents, closed_form })
}

fn tolerance_for(selector: BetaSelector) -> f64 {
    match selector {
        BetaSelector::Euler => EULER_TOL,
        _ => CLASSICAL_TOL,
    }
}

/// Quadrature value of a family integral.
pub fn classical_value(p: &BetaFamilyParams) -> Result<QuadratureValue> {
    family_request(p)?.evaluate()
}

fn compare_family(p: &BetaFamilyParams) -> Result<CheckResult> {
    let fam = family_request(p)?;
    let v = fam.evaluate()?;
    Ok(CheckResult::compare(v.value, fam.closed_form, v.evaluations, tolerance_for(p.selector)))
}

/// Two quadratures expected to give the same number.
fn agree(lhs: f64, rhs: f64, evaluations: usize) -> CheckResult {
    CheckResult::compare(lhs, rhs, evaluations, CONSISTENCY_TOL)
}

/// Checks a family integral against its closed form, plus the documented
/// reduction to the general integral where the selector is a special case.
pub fn check_family(p: &BetaFamilyParams) -> CheckResult {
    settle((|| {
        let main = compare_family(p)?;
        let lhs = main.lhs;
        Ok(match p.selector {
            BetaSelector::CuriousSucc => {
                let g = classical_value(&BetaFamilyParams::curious(p.beta + 1.0, p.beta, p.a, p.c))?;
                main.and(agree(lhs, g.value, g.evaluations), "general integral at alpha = beta + 1")
            }
            BetaSelector::CuriousDiag => {
                let g = classical_value(&BetaFamilyParams::curious(p.beta, p.beta, p.a, p.c))?;
                main.and(agree(lhs, g.value, g.evaluations), "general integral at alpha = beta")
            }
            BetaSelector::CuriousM if p.e == 0.0 => {
                // Same integrand up to the constant (2b+1-m)_m / (b+1-m)_m.
                let mf = p.m as f64;
                let alpha = p.beta + 1.0 - mf;
                let g = classical_value(&BetaFamilyParams::curious(alpha, p.beta, p.a, p.c))?;
                let factor = shifted_factorial(2.0 * p.beta + 1.0 - mf, p.m) / shifted_factorial(alpha, p.m);
                main.and(agree(lhs * factor, g.value, g.evaluations), "general integral at alpha = beta + 1 - m")
            }
            _ => main,
        })
    })())
}

/// Euler's beta integral against `Gamma(alpha) Gamma(beta) / Gamma(alpha + beta)`.
pub fn check_beta(alpha: f64, beta: f64) -> CheckResult {
    check_family(&BetaFamilyParams::euler(alpha, beta))
}

/// The curious beta integral against the beta function.
pub fn check_curious_beta(alpha: f64, beta: f64, a: f64, c: f64) -> CheckResult {
    check_family(&BetaFamilyParams::curious(alpha, beta, a, c))
}

/// The `alpha = beta + 1` case against `Gamma(beta)^2 / (2 Gamma(2 beta))`.
pub fn check_curious_beta_succ(beta: f64, a: f64, c: f64) -> CheckResult {
    check_family(&BetaFamilyParams::curious_succ(beta, a, c))
}

/// The `alpha = beta` case against `Gamma(beta)^2 / Gamma(2 beta)`.
pub fn check_curious_beta_diag(beta: f64, a: f64, c: f64) -> CheckResult {
    check_family(&BetaFamilyParams::curious_diag(beta, a, c))
}

/// The `c -> 0` limit, which has `1 / (a+t)^(2 beta + 1)` as its weight.
pub fn check_curious_beta_c0(alpha: f64, beta: f64, a: f64) -> CheckResult {
    check_family(&BetaFamilyParams::curious_c0(alpha, beta, a))
}

/// The `a = 0` case.
pub fn check_curious_beta_a0(alpha: f64, beta: f64, c: f64) -> CheckResult {
    check_family(&BetaFamilyParams::curious_a0(alpha, beta, c))
}

/// The terminating variant with parameters `e` and `m`.
pub fn check_curious_beta_m(beta: f64, a: f64, c: f64, e: f64, m: usize) -> CheckResult {
    check_family(&BetaFamilyParams::curious_m(beta, a, c, e, m))
}

/// The `c -> inf` limit of the terminating variant.
pub fn check_curious_beta_m_limit(beta: f64, m: usize, e: f64) -> CheckResult {
    check_family(&BetaFamilyParams::curious_m_limit(beta, m, e))
}

/// Re-evaluates a family integral over the half line under `t = s / (s + 1)`
/// and compares with the unit-interval quadrature.
pub fn halfline_transform_check(p: &BetaFamilyParams) -> CheckResult {
    settle((|| {
        let fam = family_request(p)?;
        let unit = fam.evaluate()?;
        let half = integrate_halfline(&fam.request())?;
        Ok(CheckResult::compare(half.value, unit.value, unit.evaluations + half.evaluations, HALFLINE_TOL))
    })())
}

/// The same parameters with the large parameter replaced by `big`, and the
/// limiting family the integral reduces to.
fn surrogate(p: &BetaFamilyParams, big: f64) -> Result<(BetaFamilyParams, BetaFamilyParams)> {
    Ok(match p.selector {
        BetaSelector::Curious => (BetaFamilyParams { c: big, ..*p }, BetaFamilyParams::euler(p.alpha, p.beta)),
        BetaSelector::CuriousC0 => (BetaFamilyParams { a: big, ..*p }, BetaFamilyParams::euler(p.alpha, p.beta)),
        BetaSelector::CuriousA0 => (BetaFamilyParams { c: big, ..*p }, BetaFamilyParams::euler(p.alpha, p.beta)),
        BetaSelector::CuriousM => {
            (BetaFamilyParams { c: big, ..*p }, BetaFamilyParams::curious_m_limit(p.beta, p.m, p.e))
        }
        other => return Err(Error::Domain(format!("{other:?} has no large-parameter limit"))),
    })
}

/// Sends the selector's large parameter through [`LARGE_SURROGATES`].
///
/// The integrals are equal for every finite value, so the trend is measured
/// on the integrands: the sup-norm distance to the limiting integrand on a
/// fixed interior grid must decrease strictly, and the integral at the last
/// surrogate must match the limiting integral.
pub fn large_parameter_trend(p: &BetaFamilyParams) -> CheckResult {
    settle((|| {
        let grid: Vec<f64> = (1..64).map(|j| j as f64 / 64.0).collect();
        let (_, limit) = surrogate(p, LARGE_SURROGATES[0])?;
        let lim = family_request(&limit)?;
        let lim_vals: Vec<f64> = grid.iter().map(|&t| (lim.integrand)(t, 1.0 - t)).collect();
        let norm = lim_vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let mut deviations = Vec::with_capacity(LARGE_SURROGATES.len());
        let mut last = None;
        for &big in &LARGE_SURROGATES {
            let (sp, _) = surrogate(p, big)?;
            let fam = family_request(&sp)?;
            let dev = grid
                .iter()
                .zip(&lim_vals)
                .map(|(&t, &l)| ((fam.integrand)(t, 1.0 - t) - l).abs())
                .fold(0.0f64, f64::max)
                / norm;
            deviations.push(dev);
            last = Some(fam);
        }
        let fam = last.expect("surrogate list is nonempty");
        let v = fam.evaluate()?;
        let l = lim.evaluate()?;
        let result = CheckResult::compare(v.value, l.value, v.evaluations + l.evaluations, LIMIT_TOL);
        let decreasing = deviations.windows(2).all(|w| w[1] < w[0]);
        let shown: Vec<String> = deviations.iter().map(|d| format!("{d:.3e}")).collect();
        let note = format!("integrand deviations [{}]", shown.join(", "));
        Ok(if decreasing {
            result.with_diagnostic(note)
        } else {
            CheckResult { status: crate::check::Status::Fail, ..result }
                .with_diagnostic(format!("not decreasing: {note}"))
        })
    })())
}

/// Parameters of Erdelyi's fractional integral formula.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErdelyiParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub mu: f64,
    pub lambda: f64,
    pub x: f64,
}

/// The raw Erdelyi integral, without the gamma prefactor.
fn erdelyi_integral(p: &ErdelyiParams) -> Result<QuadratureValue> {
    let ErdelyiParams { a, b, c, mu, lambda, x } = *p;
    require(mu > 0.0 && c > mu, "need c > mu > 0")?;
    require(x.abs() <= ARGUMENT_MARGIN, "|x| must not exceed the argument margin")?;
    let k1 = Hyp2f1Kernel::new(lambda - a, lambda - b, mu, x.abs())?;
    let k2 =
        Hyp2f1Kernel::new(a + b - lambda, lambda - mu, c - mu, max_abs_on_path(|t| (1.0 - t) * x / (1.0 - x * t)))?;
    let (p0, p1) = (mu - 1.0, c - mu - 1.0);
    let f = move |t: f64, s: f64| {
        let xt = 1.0 - x * t;
        xt.powf(lambda - a - b) * k1.eval(x * t) * k2.eval(s * x / xt) * algebraic(t, s, p0, p1)
    };
    integrate(&QuadratureRequest {
        integrand: &f,
        endpoint_exponents: (p0, p1),
        tol: QUAD_TOL,
        max_refinement: QUAD_LEVELS,
    })
}

/// `2F1(a, b; c; x)` against its fractional-integral representation.
pub fn check_erdelyi(p: &ErdelyiParams) -> CheckResult {
    settle((|| {
        let v = erdelyi_integral(p)?;
        let pref = gamma_ratio(&[p.c], &[p.mu, p.c - p.mu])?;
        let rhs = hyp2f1(p.a, p.b, p.c, p.x, &TruncationPolicy::default())?;
        Ok(CheckResult::compare(pref * v.value, rhs.value, v.evaluations + rhs.terms, CLASSICAL_TOL))
    })())
}

/// Erdelyi's formula with `lambda = mu = alpha`, `a -> beta + 1`,
/// `b = c -> alpha + beta`, `x = -1/a` becomes the `c -> 0` integral:
/// the raw integral equals `a^(2 beta + 1)` times the bare `c -> 0` integral,
/// so `((a+1)/a)^(beta+1)` times it must match the `c -> 0` left side.
pub fn check_erdelyi_to_c0(alpha: f64, beta: f64, a: f64) -> CheckResult {
    settle((|| {
        let ep =
            ErdelyiParams { a: beta + 1.0, b: alpha + beta, c: alpha + beta, mu: alpha, lambda: alpha, x: -1.0 / a };
        let raw = erdelyi_integral(&ep)?;
        let routed = ((a + 1.0) / a).powf(beta + 1.0) * raw.value;
        let c0 = family_request(&BetaFamilyParams::curious_c0(alpha, beta, a))?;
        let direct = c0.evaluate()?;
        let main = CheckResult::compare(routed, c0.closed_form, raw.evaluations, CLASSICAL_TOL);
        Ok(main.and(agree(routed, direct.value, direct.evaluations), "c -> 0 integral"))
    })())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn assert_pass(r: &CheckResult) {
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn euler_examples() {
        for (a, b, v) in [(1.0, 1.0, 1.0), (2.0, 3.0, 1.0 / 12.0), (0.5, 0.5, PI)] {
            let r = check_beta(a, b);
            assert_pass(&r);
            assert!((r.lhs - v).abs() < 1e-9 * v, "{r:?}");
        }
    }

    #[test]
    fn curious_examples() {
        let r = check_curious_beta(1.8, 1.1, 0.7, 9.0);
        assert_pass(&r);
        let r = check_curious_beta(2.0, 1.0, 1.0, 5.0);
        assert!((r.lhs - 0.5).abs() < 1e-7, "{r:?}");
    }

    #[test]
    fn succ_examples() {
        for (b, a, c, v) in [(1.0, 1.0, 5.0, 0.5), (0.5, 0.3, 4.0, PI / 2.0), (2.0, 2.0, 20.0, 1.0 / 12.0)] {
            let r = check_curious_beta_succ(b, a, c);
            assert_pass(&r);
            assert!((r.lhs - v).abs() < 1e-7 * v, "{r:?}");
        }
    }

    #[test]
    fn diag_examples() {
        let r = check_curious_beta_diag(1.0, 1.0, 5.0);
        assert_pass(&r);
        assert!((r.lhs - 1.0).abs() < 1e-7);
        assert_pass(&check_curious_beta_diag(1.5, 0.5, 6.0));
        assert_pass(&check_curious_beta_diag(0.75, 0.2, 3.0));
    }

    #[test]
    fn c0_examples() {
        let r = check_curious_beta_c0(2.0, 1.0, 0.5);
        assert_pass(&r);
        assert!((r.lhs - 0.5).abs() < 1e-7);
        assert_pass(&check_curious_beta_c0(2.3, 1.3, 2.0));
        assert_pass(&check_curious_beta_c0(2.3, 1.3, 2.0));
    }

    #[test]
    fn a0_examples() {
        let r = check_curious_beta_a0(2.0, 1.0, 5.0);
        assert_pass(&r);
        assert!((r.lhs - 0.5).abs() < 1e-7);
        assert_pass(&check_curious_beta_a0(1.6, 0.9, 3.0));
    }

    #[test]
    fn terminating_variant_examples() {
        assert_pass(&check_curious_beta_m(1.6, 0.5, 8.0, 0.3, 1));
        assert_pass(&check_curious_beta_m(1.6, 0.5, 8.0, 0.0, 2));
        assert_pass(&check_curious_beta_m(2.1, 0.3, 10.0, 0.2, 2));
        let r0 = check_curious_beta_m(1.3, 0.4, 7.0, 0.0, 0);
        let s = check_curious_beta_succ(1.3, 0.4, 7.0);
        assert_pass(&r0);
        assert!((r0.lhs - s.lhs).abs() < 1e-12);
        assert_pass(&check_curious_beta_m_limit(1.2, 1, 0.4));
        assert_pass(&check_curious_beta_m_limit(2.2, 2, -0.5));
        let r = check_curious_beta_m_limit(0.9, 0, 0.3);
        assert!((r.lhs - gamma_ratio(&[1.9, 0.9], &[2.8]).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn pole_screen_on_minus_two_beta() {
        let r = check_curious_beta_m_limit(0.5, 2, 0.1);
        assert_eq!(r.status, crate::check::Status::SkippedPole, "{r:?}");
    }

    #[test]
    fn erdelyi_examples() {
        let p = ErdelyiParams { a: 1.2, b: 0.8, c: 2.5, mu: 1.2, lambda: 1.2, x: 0.4 };
        assert_pass(&check_erdelyi(&p));
        let p = ErdelyiParams { a: 0.9, b: 1.1, c: 3.0, mu: 1.4, lambda: 1.0, x: 0.5 };
        assert_pass(&check_erdelyi(&p));
        let p = ErdelyiParams { x: 0.0, ..p };
        let r = check_erdelyi(&p);
        assert!((r.lhs - 1.0).abs() < 1e-12 && r.rhs == 1.0, "{r:?}");
        assert_pass(&check_erdelyi_to_c0(1.7, 0.8, 2.5));
    }

    #[test]
    fn halfline_examples() {
        let r = halfline_transform_check(&BetaFamilyParams::euler(2.0, 3.0));
        assert_pass(&r);
        assert!((r.lhs - 1.0 / 12.0).abs() < 1e-6);
        let r = halfline_transform_check(&BetaFamilyParams::curious_succ(1.0, 1.0, 5.0));
        assert_pass(&r);
        assert!((r.lhs - 0.5).abs() < 1e-6);
    }

    #[test]
    fn limit_trends() {
        for p in [
            BetaFamilyParams::curious(2.0, 1.5, 0.3, 9.0),
            BetaFamilyParams::curious_c0(1.7, 1.2, 2.0),
            BetaFamilyParams::curious_a0(1.6, 0.9, 3.0),
            BetaFamilyParams::curious_m(2.5, 0.3, 10.0, 0.2, 2),
        ] {
            assert_pass(&large_parameter_trend(&p));
        }
    }

    #[test]
    fn screens_reject_bad_parameters() {
        assert!(!check_curious_beta(1.8, 1.1, 0.7, 2.0).passed());
        assert!(!check_curious_beta_c0(1.3, 0.7, 0.5).passed());
        assert!(!check_curious_beta_m(0.4, 0.5, 8.0, 0.3, 2).passed());
    }
}
