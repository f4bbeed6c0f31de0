//! q-shifted factorials, the q-gamma function and `r phi r-1` series.
//!
//! Every floating evaluation here is a pure function of its arguments. Series
//! are summed with a multiplicative term recurrence and Neumaier accumulation;
//! the exact rational evaluator is the oracle for terminating sums.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sum::NeumaierSum;

/// Relative distance within which a numerator parameter counts as `q^-n`.
pub const TERMINATION_TOLERANCE: f64 = 1e-12;

/// Remaining factor count above which `(a;q)_inf` switches to its logarithmic tail.
const LOG_TAIL_MIN_FACTORS: f64 = 512.0;
const LOG_TAIL_SWITCH: f64 = 0.5;

/// A real base `q` with `0 < q < 1`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Base(f64);

impl TryFrom<f64> for Base {
    type Error = Error;

    fn try_from(q: f64) -> Result<Self> {
        Base::new(q)
    }
}

impl From<Base> for f64 {
    fn from(q: Base) -> f64 {
        q.0
    }
}

impl Base {
    pub fn new(q: f64) -> Result<Self> {
        if q > 0.0 && q < 1.0 {
            Ok(Base(q))
        } else {
            Err(Error::InvalidBase(q))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// The base `q^2`, used by the quadratic expansions.
    pub fn squared(self) -> Base {
        Base(self.0 * self.0)
    }

    /// `q^x` for real `x`.
    #[inline]
    pub fn pow(self, x: f64) -> f64 {
        self.0.powf(x)
    }

    #[inline]
    pub fn powi(self, k: i64) -> f64 {
        self.0.powi(k as i32)
    }
}

/// Tail-termination rules for infinite sums and products.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationPolicy {
    pub abs_floor: f64,
    pub rel_floor: f64,
    pub consecutive_small: usize,
    pub max_terms: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy { abs_floor: 1e-16, rel_floor: 1e-15, consecutive_small: 3, max_terms: 10_000 }
    }
}

impl TruncationPolicy {
    pub fn new(abs_floor: f64, rel_floor: f64, consecutive_small: usize, max_terms: usize) -> Result<Self> {
        if !(abs_floor > 0.0) || !(rel_floor > 0.0) {
            return Err(Error::InvalidPolicy("floors must be positive"));
        }
        if consecutive_small == 0 {
            return Err(Error::InvalidPolicy("consecutive_small must be at least 1"));
        }
        if max_terms == 0 {
            return Err(Error::InvalidPolicy("max_terms must be at least 1"));
        }
        Ok(TruncationPolicy { abs_floor, rel_floor, consecutive_small, max_terms })
    }

    /// Policy for series nested inside an outer sum.
    pub fn inner() -> Self {
        Self::default().tightened()
    }

    /// Same budget with floors tight enough that an inner series does not
    /// dominate the error of the sum it sits in.
    pub fn tightened(self) -> Self {
        TruncationPolicy { rel_floor: self.rel_floor.min(1e-16), abs_floor: self.abs_floor.min(1e-18), ..self }
    }

    /// Raises `max_terms` so that geometric tails in `q` fit the budget near `q = 1`.
    pub fn for_base(self, q: Base) -> Self {
        let needed = (200.0 / (1.0 - q.get())).ceil() as usize;
        TruncationPolicy { max_terms: self.max_terms.max(needed), ..self }
    }

    pub fn with_max_terms(self, max_terms: usize) -> Self {
        TruncationPolicy { max_terms, ..self }
    }
}

/// `(a;q)_k` for any integer `k`.
pub fn qpoch_finite(a: f64, q: Base, k: i64) -> Result<f64> {
    let qv = q.get();
    if k >= 0 {
        let mut p = 1.0;
        let mut x = a;
        for _ in 0..k {
            p *= 1.0 - x;
            x *= qv;
        }
        Ok(p)
    } else {
        let mut p = 1.0;
        for j in 1..=(-k) {
            let f = 1.0 - a * q.powi(-j);
            if f == 0.0 {
                return Err(Error::ZeroDenominator { context: "negative-index q-shifted factorial", index: j });
            }
            p *= f;
        }
        Ok(1.0 / p)
    }
}

/// `(a;q)_inf`.
///
/// Factors are multiplied until `|a q^j| < abs_floor` holds for
/// `consecutive_small` successive `j`. When that would take more than a few
/// hundred factors (q close to 1) the remaining product past `|a q^j| <= 1/2`
/// is taken from `log (y;q)_inf = -sum_n y^n / (n (1 - q^n))`.
pub fn qpoch_infinite(a: f64, q: Base, policy: &TruncationPolicy) -> Result<f64> {
    if a == 0.0 {
        return Ok(1.0);
    }
    let qv = q.get();
    let ln_q = qv.ln();
    let mut p = 1.0;
    let mut x = a;
    let mut small = 0usize;
    let mut j = 0usize;
    loop {
        if x.abs() < policy.abs_floor {
            small += 1;
            if small >= policy.consecutive_small {
                return Ok(p);
            }
        } else {
            small = 0;
            if x.abs() <= LOG_TAIL_SWITCH {
                let remaining = (policy.abs_floor / x.abs()).ln() / ln_q;
                if remaining > LOG_TAIL_MIN_FACTORS {
                    return Ok(p * log_tail(x, ln_q, policy)?.exp());
                }
            }
        }
        p *= 1.0 - x;
        if p == 0.0 {
            return Ok(0.0);
        }
        x *= qv;
        j += 1;
        if j >= policy.max_terms {
            return Err(Error::Truncation { partial: p, terms: j });
        }
    }
}

fn log_tail(y: f64, ln_q: f64, policy: &TruncationPolicy) -> Result<f64> {
    let mut acc = NeumaierSum::new();
    let mut yn = 1.0;
    for n in 1..=policy.max_terms {
        yn *= y;
        let one_minus_qn = -(n as f64 * ln_q).exp_m1();
        let term = -yn / (n as f64 * one_minus_qn);
        acc.add(term);
        if term.abs() <= 1e-18 * acc.value().abs().max(1e-300) {
            return Ok(acc.value());
        }
    }
    Err(Error::Truncation { partial: acc.value(), terms: policy.max_terms })
}

/// `log |(a;q)_inf|` and the sign of the product.
///
/// Products with `q` near 1 leave the double range long before their ratios
/// do; this form keeps such ratios finite. A vanishing factor gives
/// `(-inf, 0.0)`.
pub fn qpoch_infinite_ln(a: f64, q: Base, policy: &TruncationPolicy) -> Result<(f64, f64)> {
    if a == 0.0 {
        return Ok((0.0, 1.0));
    }
    let ln_q = q.get().ln();
    let mut acc = NeumaierSum::new();
    let mut sign = 1.0;
    let mut x = a;
    let mut small = 0usize;
    for _ in 0..policy.max_terms {
        if x.abs() < policy.abs_floor {
            small += 1;
            if small >= policy.consecutive_small {
                return Ok((acc.value(), sign));
            }
        } else {
            small = 0;
            if x.abs() <= LOG_TAIL_SWITCH {
                let remaining = (policy.abs_floor / x.abs()).ln() / ln_q;
                if remaining > LOG_TAIL_MIN_FACTORS {
                    acc.add(log_tail(x, ln_q, policy)?);
                    return Ok((acc.value(), sign));
                }
            }
        }
        let f = 1.0 - x;
        if f == 0.0 {
            return Ok((f64::NEG_INFINITY, 0.0));
        }
        if f < 0.0 {
            sign = -sign;
        }
        acc.add(if x < 1.0 { (-x).ln_1p() } else { (x - 1.0).ln() });
        x *= q.get();
    }
    Err(Error::Truncation { partial: sign * acc.value().exp(), terms: policy.max_terms })
}

/// `prod_i (num_i;q)_inf / prod_j (den_j;q)_inf`, evaluated through logarithms.
pub fn qpoch_ratio(num: &[f64], den: &[f64], q: Base, policy: &TruncationPolicy) -> Result<f64> {
    let mut ln = NeumaierSum::new();
    let mut sign = 1.0;
    for &a in num {
        let (l, s) = qpoch_infinite_ln(a, q, policy)?;
        if s == 0.0 {
            return Ok(0.0);
        }
        ln.add(l);
        sign *= s;
    }
    for &b in den {
        let (l, s) = qpoch_infinite_ln(b, q, policy)?;
        if s == 0.0 {
            return Err(Error::ZeroDenominator { context: "infinite q-shifted factorial", index: 0 });
        }
        ln.add(-l);
        sign *= s;
    }
    Ok(sign * ln.value().exp())
}

/// Thomae's q-gamma function `(1-q)^(1-x) (q;q)_inf / (q^x;q)_inf`.
pub fn qgamma(x: f64, q: Base, policy: &TruncationPolicy) -> Result<f64> {
    if x <= 0.0 && x.fract() == 0.0 {
        return Err(Error::Pole { function: "q-gamma", at: x });
    }
    let (num, _) = qpoch_infinite_ln(q.get(), q, policy)?;
    let (den, sign) = qpoch_infinite_ln(q.pow(x), q, policy)?;
    if sign == 0.0 {
        return Err(Error::Pole { function: "q-gamma", at: x });
    }
    Ok(sign * ((1.0 - x) * (-q.get()).ln_1p() + num - den).exp())
}

/// Sums `term(0) + term(1) + ...` with the policy's stopping rule.
pub(crate) fn sum_terms<F>(policy: &TruncationPolicy, mut term: F) -> Result<SeriesValue>
where
    F: FnMut(usize) -> Result<f64>,
{
    let mut acc = NeumaierSum::new();
    let mut small = 0usize;
    for k in 0..policy.max_terms {
        let t = term(k)?;
        if !t.is_finite() {
            return Err(Error::ZeroDenominator { context: "summand", index: k as i64 });
        }
        acc.add(t);
        if t.abs() < policy.abs_floor.max(policy.rel_floor * acc.value().abs()) {
            small += 1;
            if small >= policy.consecutive_small {
                crate::sum::record_condition(acc.condition());
                return Ok(SeriesValue { value: acc.value(), terms: k + 1 });
            }
        } else {
            small = 0;
        }
    }
    Err(Error::Truncation { partial: acc.value(), terms: policy.max_terms })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SeriesKind {
    /// `r phi r-1` in base `q`.
    Basic(Base),
    /// `r F r-1`.
    Ordinary,
}

/// One `r phi r-1` or `r F r-1` evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesSpec {
    pub numerator: Vec<f64>,
    pub denominator: Vec<f64>,
    pub argument: f64,
    pub kind: SeriesKind,
}

/// A summed series and the number of terms that went into it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub terms: usize,
}

impl SeriesSpec {
    pub fn basic(numerator: Vec<f64>, denominator: Vec<f64>, q: Base, argument: f64) -> Result<Self> {
        Self::build(numerator, denominator, argument, SeriesKind::Basic(q))
    }

    pub fn ordinary(numerator: Vec<f64>, denominator: Vec<f64>, argument: f64) -> Result<Self> {
        Self::build(numerator, denominator, argument, SeriesKind::Ordinary)
    }

    fn build(numerator: Vec<f64>, denominator: Vec<f64>, argument: f64, kind: SeriesKind) -> Result<Self> {
        if numerator.is_empty() || denominator.len() + 1 != numerator.len() {
            return Err(Error::Shape { numerator: numerator.len(), denominator: denominator.len() });
        }
        Ok(SeriesSpec { numerator, denominator, argument, kind })
    }

    /// Smallest `n` such that some numerator parameter is `q^-n` (or `-n`).
    pub fn termination_order(&self, max_terms: usize) -> Option<usize> {
        self.numerator
            .iter()
            .filter_map(|&a| match self.kind {
                SeriesKind::Basic(q) => basic_termination(a, q, max_terms),
                SeriesKind::Ordinary => ordinary_termination(a, max_terms),
            })
            .min()
    }

    #[inline]
    fn term_ratio(&self, k: usize, qk: f64) -> Result<f64> {
        let mut num = self.argument;
        let mut den;
        match self.kind {
            SeriesKind::Basic(q) => {
                for &a in &self.numerator {
                    num *= 1.0 - a * qk;
                }
                den = 1.0 - qk * q.get();
                for &b in &self.denominator {
                    den *= 1.0 - b * qk;
                }
            }
            SeriesKind::Ordinary => {
                let kf = k as f64;
                for &a in &self.numerator {
                    num *= a + kf;
                }
                den = kf + 1.0;
                for &b in &self.denominator {
                    den *= b + kf;
                }
            }
        }
        if den == 0.0 {
            return Err(Error::ZeroDenominator { context: "series denominator", index: k as i64 });
        }
        Ok(num / den)
    }
}

fn basic_termination(a: f64, q: Base, max_terms: usize) -> Option<usize> {
    if !(a >= 1.0 - TERMINATION_TOLERANCE) {
        return None;
    }
    let n = (a.ln() / -q.get().ln()).round();
    if n < 0.0 || n > max_terms as f64 {
        return None;
    }
    let target = q.pow(-n);
    ((a - target).abs() <= TERMINATION_TOLERANCE * target).then_some(n as usize)
}

fn ordinary_termination(a: f64, max_terms: usize) -> Option<usize> {
    if a > TERMINATION_TOLERANCE {
        return None;
    }
    let n = (-a).round();
    if n > max_terms as f64 {
        return None;
    }
    ((a + n).abs() <= TERMINATION_TOLERANCE * n.max(1.0)).then_some(n as usize)
}

/// Shared summation loop for both series kinds.
pub(crate) fn sum_series(spec: &SeriesSpec, policy: &TruncationPolicy) -> Result<SeriesValue> {
    let stop = spec.termination_order(policy.max_terms);
    if stop.is_none() && spec.argument.abs() >= 1.0 {
        return Err(Error::Divergent { argument: spec.argument });
    }
    let q = match spec.kind {
        SeriesKind::Basic(q) => q.get(),
        SeriesKind::Ordinary => 1.0,
    };
    let mut acc = NeumaierSum::new();
    let mut term = 1.0;
    let mut qk = 1.0;
    let mut small = 0usize;
    let mut k = 0usize;
    loop {
        acc.add(term);
        match stop {
            Some(n) if k == n => {
                crate::sum::record_condition(acc.condition());
                return Ok(SeriesValue { value: acc.value(), terms: k + 1 });
            }
            Some(_) => {}
            None => {
                let floor = policy.abs_floor.max(policy.rel_floor * acc.value().abs());
                if term.abs() < floor {
                    small += 1;
                    if small >= policy.consecutive_small {
                        crate::sum::record_condition(acc.condition());
                        return Ok(SeriesValue { value: acc.value(), terms: k + 1 });
                    }
                } else {
                    small = 0;
                }
                if k + 1 >= policy.max_terms {
                    return Err(Error::Truncation { partial: acc.value(), terms: k + 1 });
                }
            }
        }
        term *= spec.term_ratio(k, qk)?;
        if !term.is_finite() {
            return Err(Error::ZeroDenominator { context: "series term overflow", index: k as i64 + 1 });
        }
        qk *= q;
        k += 1;
    }
}

/// Sums a basic hypergeometric series `r phi r-1`.
pub fn eval_series(spec: &SeriesSpec, policy: &TruncationPolicy) -> Result<SeriesValue> {
    match spec.kind {
        SeriesKind::Basic(_) => sum_series(spec, policy),
        SeriesKind::Ordinary => Err(Error::Domain("eval_series expects a basic (q) series".into())),
    }
}

/// Shorthand for a `2 phi 1` value.
pub fn phi21(a: f64, b: f64, c: f64, q: Base, z: f64, policy: &TruncationPolicy) -> Result<SeriesValue> {
    eval_series(&SeriesSpec::basic(vec![a, b], vec![c], q, z)?, policy)
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExactKind {
    Basic(BigRational),
    Ordinary,
}

/// A terminating series with exact rational data.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactSeriesSpec {
    pub numerator: Vec<BigRational>,
    pub denominator: Vec<BigRational>,
    pub argument: BigRational,
    pub kind: ExactKind,
}

/// Upper bound on the termination order searched for exact series.
const EXACT_MAX_ORDER: usize = 10_000;

impl ExactSeriesSpec {
    pub fn termination_order(&self) -> Option<usize> {
        self.numerator
            .iter()
            .filter_map(|a| match &self.kind {
                ExactKind::Basic(q) => {
                    let inv = q.recip();
                    let mut p = BigRational::one();
                    for n in 0..=EXACT_MAX_ORDER {
                        if &p == a {
                            return Some(n);
                        }
                        if p.abs() > a.abs() {
                            return None;
                        }
                        p *= &inv;
                    }
                    None
                }
                ExactKind::Ordinary => {
                    if a.is_integer() && !a.is_positive() {
                        let n = -a.to_integer();
                        (n <= BigInt::from(EXACT_MAX_ORDER)).then(|| n.to_string().parse().unwrap())
                    } else {
                        None
                    }
                }
            })
            .min()
    }
}

/// Exact value of a terminating series.
pub fn eval_series_exact(spec: &ExactSeriesSpec) -> Result<BigRational> {
    if spec.numerator.is_empty() || spec.denominator.len() + 1 != spec.numerator.len() {
        return Err(Error::Shape { numerator: spec.numerator.len(), denominator: spec.denominator.len() });
    }
    let n = spec.termination_order().ok_or(Error::NotTerminating)?;
    let one = BigRational::one();
    let mut sum = BigRational::zero();
    let mut term = one.clone();
    let mut qk = one.clone();
    for k in 0..=n {
        sum += &term;
        if k == n {
            break;
        }
        let (mut num, mut den) = (spec.argument.clone(), BigRational::one());
        match &spec.kind {
            ExactKind::Basic(q) => {
                for a in &spec.numerator {
                    num *= &one - a * &qk;
                }
                den *= &one - &qk * q;
                for b in &spec.denominator {
                    den *= &one - b * &qk;
                }
                qk *= q;
            }
            ExactKind::Ordinary => {
                let kq = BigRational::from_integer(BigInt::from(k));
                for a in &spec.numerator {
                    num *= a + &kq;
                }
                den *= &kq + &one;
                for b in &spec.denominator {
                    den *= b + &kq;
                }
            }
        }
        if den.is_zero() {
            return Err(Error::ZeroDenominator { context: "exact series denominator", index: k as i64 });
        }
        term = term * num / den;
    }
    Ok(sum)
}

/// Exact `(a;q)_k` for `k >= 0`.
pub fn qpoch_exact(a: &BigRational, q: &BigRational, k: usize) -> BigRational {
    let one = BigRational::one();
    let mut p = one.clone();
    let mut x = a.clone();
    for _ in 0..k {
        p *= &one - &x;
        x *= q;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: f64) -> Base {
        Base::new(v).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn base_rejects_closed_endpoints() {
        assert!(Base::new(0.0).is_err());
        assert!(Base::new(1.0).is_err());
        assert!(Base::new(-0.5).is_err());
        assert!(Base::new(0.999).is_ok());
    }

    #[test]
    fn policy_validation() {
        assert!(TruncationPolicy::new(0.0, 1e-15, 3, 10).is_err());
        assert!(TruncationPolicy::new(1e-16, 1e-15, 0, 10).is_err());
        assert!(TruncationPolicy::new(1e-16, 1e-15, 3, 0).is_err());
        let p = TruncationPolicy::default();
        assert_eq!((p.abs_floor, p.rel_floor, p.consecutive_small, p.max_terms), (1e-16, 1e-15, 3, 10_000));
    }

    #[test]
    fn finite_pochhammer_examples() {
        assert_eq!(qpoch_finite(0.7, q(0.5), 0).unwrap(), 1.0);
        assert_eq!(qpoch_finite(0.5, q(0.5), 3).unwrap(), 21.0 / 64.0);
        assert_eq!(qpoch_finite(0.25, q(0.5), -1).unwrap(), 2.0);
    }

    #[test]
    fn negative_index_pole_is_reported() {
        // 1 - a q^-1 vanishes for a = q.
        let err = qpoch_finite(0.5, q(0.5), -2).unwrap_err();
        assert!(matches!(err, Error::ZeroDenominator { index: 1, .. }));
    }

    #[test]
    fn infinite_pochhammer_examples() {
        let p = TruncationPolicy::default();
        assert_eq!(qpoch_infinite(0.0, q(0.5), &p).unwrap(), 1.0);
        assert_eq!(qpoch_infinite(1.0, q(0.5), &p).unwrap(), 0.0);
        let long: f64 = (0..200).map(|j| 1.0 - 0.5 * 0.5f64.powi(j)).product();
        assert!((qpoch_infinite(0.5, q(0.5), &p).unwrap() - long).abs() < 1e-14);
    }

    #[test]
    fn log_tail_agrees_with_long_product_near_one() {
        let p = TruncationPolicy::default().for_base(q(0.995));
        for &a in &[0.9, 0.5, -0.7, 0.995f64.powf(2.5)] {
            let mut direct = 1.0;
            let mut x: f64 = a;
            while x.abs() > 1e-20 {
                direct *= 1.0 - x;
                x *= 0.995;
            }
            let fast = qpoch_infinite(a, q(0.995), &p).unwrap();
            assert!(((fast - direct) / direct).abs() < 1e-11, "a={a}: {fast} vs {direct}");
        }
    }

    #[test]
    fn max_terms_reports_partial_product() {
        let p = TruncationPolicy::default().with_max_terms(5);
        match qpoch_infinite(0.5, q(0.9), &p) {
            Err(Error::Truncation { partial, terms }) => {
                assert_eq!(terms, 5);
                assert!(partial > 0.0 && partial < 1.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn log_form_matches_product() {
        let p = TruncationPolicy::default();
        for &a in &[0.3, -0.8, 1.7, 4.0, 0.9] {
            let direct = qpoch_infinite(a, q(0.5), &p).unwrap();
            let (l, s) = qpoch_infinite_ln(a, q(0.5), &p).unwrap();
            assert!((s * l.exp() - direct).abs() <= 1e-14 * direct.abs(), "a={a}");
        }
        assert_eq!(qpoch_infinite_ln(2.0, q(0.5), &p).unwrap().1, 0.0);
        // (q;q)_inf underflows at q = 0.999 but the ratio with (q^2;q)_inf is 1 - q.
        let p = p.for_base(q(0.999));
        let r = qpoch_ratio(&[0.999], &[0.999 * 0.999], q(0.999), &p).unwrap();
        assert!((r - 0.001).abs() < 1e-14, "{r}");
    }

    #[test]
    fn qgamma_examples() {
        let p = TruncationPolicy::default();
        assert!((qgamma(1.0, q(0.5), &p).unwrap() - 1.0).abs() < 1e-15);
        assert!((qgamma(2.0, q(0.5), &p).unwrap() - 1.0).abs() < 1e-15);
        assert!((qgamma(3.0, q(0.5), &p).unwrap() - 1.5).abs() < 1e-15);
        assert!(matches!(qgamma(-2.0, q(0.5), &p), Err(Error::Pole { .. })));
        assert!(matches!(qgamma(0.0, q(0.5), &p), Err(Error::Pole { .. })));
    }

    #[test]
    fn series_with_unit_numerator_is_one() {
        let spec = SeriesSpec::basic(vec![1.0, 0.3], vec![0.7], q(0.5), 0.9).unwrap();
        let v = eval_series(&spec, &TruncationPolicy::default()).unwrap();
        assert_eq!((v.value, v.terms), (1.0, 1));
    }

    #[test]
    fn q_gauss_instance_matches_products() {
        // Brute-force oracle: 500 terms with explicit Pochhammers.
        let (qq, a, b, c) = (0.5f64, 0.5, 0.5, 0.125);
        let z = c / (a * b);
        let mut brute = 0.0;
        for k in 0..500 {
            let kk = k as i64;
            let num = qpoch_finite(a, q(qq), kk).unwrap() * qpoch_finite(b, q(qq), kk).unwrap();
            let den = qpoch_finite(qq, q(qq), kk).unwrap() * qpoch_finite(c, q(qq), kk).unwrap();
            brute += num / den * z.powi(k);
        }
        let p = TruncationPolicy::default();
        let closed = qpoch_infinite(c / a, q(qq), &p).unwrap() * qpoch_infinite(c / b, q(qq), &p).unwrap()
            / (qpoch_infinite(c, q(qq), &p).unwrap() * qpoch_infinite(z, q(qq), &p).unwrap());
        let series = phi21(a, b, c, q(qq), z, &p).unwrap().value;
        assert!((series - brute).abs() < 1e-14 * brute.abs());
        assert!((series - closed).abs() < 1e-13 * closed.abs());
    }

    #[test]
    fn q_binomial_instance() {
        let p = TruncationPolicy::default();
        let (a, z) = (0.25, 0.5);
        let spec = SeriesSpec::basic(vec![a], vec![], q(0.5), z).unwrap();
        let mut brute = 0.0;
        for k in 0..400i64 {
            brute += qpoch_finite(a, q(0.5), k).unwrap() / qpoch_finite(0.5, q(0.5), k).unwrap() * z.powi(k as i32);
        }
        let v = eval_series(&spec, &p).unwrap().value;
        let closed = qpoch_infinite(a * z, q(0.5), &p).unwrap() / qpoch_infinite(z, q(0.5), &p).unwrap();
        assert!((v - brute).abs() < 1e-14);
        assert!((v - closed).abs() < 1e-14);
    }

    #[test]
    fn divergence_and_shape_errors() {
        let p = TruncationPolicy::default();
        let spec = SeriesSpec::basic(vec![0.3, 0.4], vec![0.5], q(0.5), 1.0).unwrap();
        assert!(matches!(eval_series(&spec, &p), Err(Error::Divergent { .. })));
        assert!(matches!(SeriesSpec::basic(vec![0.3, 0.4], vec![], q(0.5), 0.1), Err(Error::Shape { .. })));
        // terminating series are fine at |z| >= 1
        let spec = SeriesSpec::basic(vec![4.0, 0.4], vec![0.5], q(0.5), 3.0).unwrap();
        assert_eq!(eval_series(&spec, &p).unwrap().terms, 3);
    }

    #[test]
    fn zero_denominator_before_termination() {
        // (q^-3;q)_k terminates at k = 3 but (q^-1;q)_2 = 0 in the denominator.
        let spec = SeriesSpec::basic(vec![8.0, 0.3], vec![2.0], q(0.5), 0.5).unwrap();
        let err = eval_series(&spec, &TruncationPolicy::default()).unwrap_err();
        assert!(matches!(err, Error::ZeroDenominator { index: 1, .. }));
    }

    #[test]
    fn termination_detection_tolerance() {
        let spec = SeriesSpec::basic(vec![8.0 * (1.0 + 5e-13), 0.2], vec![0.3], q(0.5), 0.1).unwrap();
        assert_eq!(spec.termination_order(10_000), Some(3));
        let spec = SeriesSpec::basic(vec![8.0 * (1.0 + 1e-9), 0.2], vec![0.3], q(0.5), 0.1).unwrap();
        assert_eq!(spec.termination_order(10_000), None);
    }

    #[test]
    fn exact_two_term_closed_form() {
        let (qq, b, c, z) = (rat(1, 2), rat(2, 3), rat(3, 7), rat(5, 11));
        let spec = ExactSeriesSpec {
            numerator: vec![qq.recip(), b.clone()],
            denominator: vec![c.clone()],
            argument: z.clone(),
            kind: ExactKind::Basic(qq.clone()),
        };
        let one = BigRational::one();
        let expected = &one + (&one - qq.recip()) * (&one - &b) * &z / ((&one - &qq) * (&one - &c));
        assert_eq!(eval_series_exact(&spec).unwrap(), expected);
    }

    #[test]
    fn exact_rejects_nonterminating() {
        let spec = ExactSeriesSpec {
            numerator: vec![rat(1, 3), rat(2, 5)],
            denominator: vec![rat(1, 7)],
            argument: rat(1, 2),
            kind: ExactKind::Basic(rat(1, 2)),
        };
        assert_eq!(eval_series_exact(&spec), Err(Error::NotTerminating));
        let unit = ExactSeriesSpec { numerator: vec![rat(1, 1), rat(2, 5)], ..spec };
        assert_eq!(eval_series_exact(&unit).unwrap(), BigRational::one());
    }
}
