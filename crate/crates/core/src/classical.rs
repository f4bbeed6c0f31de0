//! Gamma function, rising factorials and `r F r-1` series.

use std::f64::consts::PI;

use crate::check::{settle, CheckResult};
use crate::error::{Error, Result};
use crate::qcore::{sum_series, SeriesKind, SeriesSpec, SeriesValue, TruncationPolicy};
use crate::sum::NeumaierSum;

// Lanczos approximation, g = 7, nine terms. Coefficients as published.
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `Gamma(x)` for real `x` away from the poles at `0, -1, -2, ...`.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if x <= 0.0 && x.fract() == 0.0 {
        return Err(Error::Pole { function: "gamma", at: x });
    }
    if x < 0.5 {
        let s = (PI * x).sin();
        return Ok(PI / (s * gamma_fn(1.0 - x)?));
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    // t^(x+1/2) split in two so moderately large arguments do not overflow early.
    let half = t.powf(0.5 * (x + 0.5));
    Ok((2.0 * PI).sqrt() * half * (-t).exp() * half * acc)
}

/// `prod Gamma(num_i) / prod Gamma(den_j)`.
pub fn gamma_ratio(num: &[f64], den: &[f64]) -> Result<f64> {
    let mut r = 1.0;
    for &x in num {
        r *= gamma_fn(x)?;
    }
    for &x in den {
        r /= gamma_fn(x)?;
    }
    Ok(r)
}

/// Euler's beta function `Gamma(a) Gamma(b) / Gamma(a + b)`.
pub fn beta_fn(a: f64, b: f64) -> Result<f64> {
    gamma_ratio(&[a, b], &[a + b])
}

/// The rising factorial `(a)_k`.
pub fn shifted_factorial(a: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |p, j| p * (a + j as f64))
}

/// Sums an ordinary hypergeometric series `r F r-1`.
pub fn eval_hyper(spec: &SeriesSpec, policy: &TruncationPolicy) -> Result<SeriesValue> {
    match spec.kind {
        SeriesKind::Ordinary => sum_series(spec, policy),
        SeriesKind::Basic(_) => Err(Error::Domain("eval_hyper expects an ordinary series".into())),
    }
}

/// `2F1(a, b; c; x)`.
pub fn hyp2f1(a: f64, b: f64, c: f64, x: f64, policy: &TruncationPolicy) -> Result<SeriesValue> {
    eval_hyper(&SeriesSpec::ordinary(vec![a, b], vec![c], x)?, policy)
}

/// Partial sums used by [`gauss_sum`].
const GAUSS_BLOCK: usize = 8192;

/// `2F1(a, b; c; 1)` summed directly, for `c - a - b > 0`.
///
/// The tail past `K` terms is estimated as `t_K (K/s - 1/2)` with
/// `s = c - a - b`; the remaining error behaves like `K^(-s-j)`, so the
/// estimates at `K`, `2K`, `4K` are combined by two Richardson steps.
pub fn gauss_sum(a: f64, b: f64, c: f64) -> Result<SeriesValue> {
    let s = c - a - b;
    if !(s > 0.0) {
        return Err(Error::Domain(format!("Gauss sum needs c - a - b > 0, got {s}")));
    }
    let spec = SeriesSpec::ordinary(vec![a, b], vec![c], 1.0)?;
    if let Some(n) = spec.termination_order(usize::MAX >> 1) {
        let policy = TruncationPolicy::default().with_max_terms(n + 1);
        return eval_hyper(&spec, &policy);
    }
    let mut acc = NeumaierSum::new();
    let mut term = 1.0;
    let mut estimates = Vec::with_capacity(3);
    let mut k = 0usize;
    for level in 0..3 {
        let stop = GAUSS_BLOCK << level;
        while k < stop {
            acc.add(term);
            let kf = k as f64;
            let den = (c + kf) * (kf + 1.0);
            if den == 0.0 {
                return Err(Error::ZeroDenominator { context: "Gauss sum", index: k as i64 });
            }
            term *= (a + kf) * (b + kf) / den;
            k += 1;
        }
        // `term` is now t_K with K = stop; the partial sum covers t_0..t_{K-1}.
        let kf = stop as f64;
        estimates.push(acc.value() + term * (kf / s + 0.5));
    }
    let r1 = 2f64.powf(1.0 + s);
    let r2 = 2f64.powf(2.0 + s);
    let e01 = (r1 * estimates[1] - estimates[0]) / (r1 - 1.0);
    let e12 = (r1 * estimates[2] - estimates[1]) / (r1 - 1.0);
    let value = (r2 * e12 - e01) / (r2 - 1.0);
    Ok(SeriesValue { value, terms: k })
}

/// Gauss summation `2F1(a,b;c;1) = Gamma(c) Gamma(c-a-b) / (Gamma(c-a) Gamma(c-b))`.
pub fn gauss_summation_check(a: f64, b: f64, c: f64, tolerance: f64) -> CheckResult {
    settle((|| {
        let lhs = gauss_sum(a, b, c)?;
        let rhs = gamma_ratio(&[c, c - a - b], &[c - a, c - b])?;
        Ok(CheckResult::compare(lhs.value, rhs, lhs.terms, tolerance))
    })())
}

/// Legendre duplication and the rewritten left-hand side of the
/// `Gamma(beta)^2 / (2 Gamma(2 beta))` evaluations.
pub fn legendre_duplication_check(beta: f64) -> CheckResult {
    settle((|| {
        let lhs = gamma_fn(2.0 * beta)?;
        let rhs = PI.sqrt().recip() * 2f64.powf(2.0 * beta - 1.0) * gamma_fn(beta)? * gamma_fn(beta + 0.5)?;
        let dup = CheckResult::compare(lhs, rhs, 0, 1e-12);
        let half_beta = gamma_fn(beta)?.powi(2) / (2.0 * lhs);
        let rewritten = PI.sqrt() / 4f64.powf(beta) * gamma_fn(beta)? / gamma_fn(beta + 0.5)?;
        Ok(dup.and(CheckResult::compare(half_beta, rewritten, 0, 1e-12), "sqrt(pi)/4^beta form"))
    })())
}

/// Pfaff's transformation for a terminating `2F1(-m, b; c; x)`.
pub fn pfaff_transform_check(m: usize, b: f64, c: f64, x: f64) -> CheckResult {
    settle((|| {
        let policy = TruncationPolicy::default();
        let lhs = hyp2f1(-(m as f64), b, c, x, &policy)?;
        let cm = shifted_factorial(c, m);
        if cm == 0.0 {
            return Err(Error::ZeroDenominator { context: "(c)_m in Pfaff transformation", index: m as i64 });
        }
        let right = hyp2f1(-(m as f64), b, b + 1.0 - m as f64 - c, 1.0 - x, &policy)?;
        let rhs = shifted_factorial(c - b, m) / cm * right.value;
        Ok(CheckResult::compare(lhs.value, rhs, lhs.terms + right.terms, 1e-12))
    })())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{eval_series_exact, ExactKind, ExactSeriesSpec};
    use num_rational::BigRational;
    use num_traits::ToPrimitive;

    #[test]
    fn gamma_values() {
        assert!((gamma_fn(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((gamma_fn(5.0).unwrap() - 24.0).abs() < 24.0 * 1e-14);
        assert!((gamma_fn(0.5).unwrap() - PI.sqrt()).abs() < 1e-14);
        assert!((gamma_fn(-0.5).unwrap() + 2.0 * PI.sqrt()).abs() < 1e-13);
        assert!(gamma_fn(-3.0).is_err());
        assert!(gamma_fn(0.0).is_err());
        // 20! = Gamma(21)
        let f20 = 2_432_902_008_176_640_000f64;
        assert!(((gamma_fn(21.0).unwrap() - f20) / f20).abs() < 1e-13);
    }

    #[test]
    fn shifted_factorial_recurrence() {
        assert_eq!(shifted_factorial(0.3, 0), 1.0);
        assert_eq!(shifted_factorial(2.0, 3), 24.0);
        assert_eq!(shifted_factorial(-2.0, 3), 0.0);
    }

    #[test]
    fn hyper_examples() {
        let p = TruncationPolicy::default();
        assert_eq!(hyp2f1(-0.0, 0.4, 0.7, 0.9, &p).unwrap().value, 1.0);
        let v = hyp2f1(1.0, 1.0, 2.0, 0.5, &p).unwrap().value;
        assert!((v - 2.0 * 2f64.ln()).abs() < 1e-14);
        let brute: f64 = (0..200).map(|k| 0.5f64.powi(k) / (k + 1) as f64).sum();
        assert!((v - brute).abs() < 1e-14);
    }

    #[test]
    fn gauss_summation_instance() {
        let r = gauss_summation_check(0.3, 0.4, 2.0, 1e-11);
        assert!(r.passed(), "{r:?}");
        let r = gauss_summation_check(0.6, -0.5, 1.2, 1e-11);
        assert!(r.passed(), "{r:?}");
        // s = 0.3, the slowest admissible decay
        let r = gauss_summation_check(0.9, 0.8, 2.0, 1e-10);
        assert!(r.passed(), "{r:?}");
        // terminating
        let r = gauss_summation_check(-3.0, 0.4, 2.0, 1e-14);
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn legendre_examples() {
        for beta in [1.0, 0.5, 2.3, 0.9, 4.75] {
            let r = legendre_duplication_check(beta);
            assert!(r.passed(), "beta={beta}: {r:?}");
        }
        assert!(!legendre_duplication_check(-1.0).passed());
    }

    #[test]
    fn pfaff_examples() {
        let r = pfaff_transform_check(0, 0.4, 1.3, 0.2);
        assert_eq!((r.lhs, r.rhs), (1.0, 1.0));
        let r = pfaff_transform_check(1, 2.0, 3.0, 0.4);
        assert!((r.lhs - 11.0 / 15.0).abs() < 1e-15 && r.passed());
        assert!(pfaff_transform_check(3, 0.7, 2.2, 0.6).passed());
    }

    #[test]
    fn pfaff_exact_rational() {
        // m=3, b=7/10, c=11/5, x=3/5 in exact arithmetic on both sides.
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        let (b, c, x) = (r(7, 10), r(11, 5), r(3, 5));
        let f = |num: Vec<BigRational>, den: Vec<BigRational>, z: BigRational| {
            eval_series_exact(&ExactSeriesSpec {
                numerator: num,
                denominator: den,
                argument: z,
                kind: ExactKind::Ordinary,
            })
            .unwrap()
        };
        let lhs = f(vec![r(-3, 1), b.clone()], vec![c.clone()], x.clone());
        let poch = |a: &BigRational| (0..3).fold(r(1, 1), |p, j| p * (a + r(j, 1)));
        let rhs =
            poch(&(&c - &b)) / poch(&c) * f(vec![r(-3, 1), b.clone()], vec![&b + r(1, 1) - r(3, 1) - &c], r(1, 1) - &x);
        assert_eq!(lhs, rhs);
        let float = pfaff_transform_check(3, 0.7, 2.2, 0.6);
        assert!((float.lhs - lhs.to_f64().unwrap()).abs() < 1e-14);
    }
}
