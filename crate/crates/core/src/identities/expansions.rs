use crate::check::{settle, CheckResult};
use crate::error::Result;
use crate::qcore::{
    eval_series, qpoch_finite as pfin, qpoch_infinite as pinf, Base, SeriesSpec, SeriesValue, TruncationPolicy,
};

use super::{nonzero, require, sum_terms, EXPANSION_TOL};

/// Scalars shared by the expansions built on `u_k = a + b q^k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CuriousParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub q: Base,
}

impl CuriousParams {
    pub fn new(a: f64, b: f64, c: f64, q: Base) -> Self {
        CuriousParams { a, b, c, q }
    }

    fn u(&self, k: usize) -> f64 {
        self.a + self.b * self.q.powi(k as i64)
    }

    /// `X_k = u_k / (c - a u_k)`.
    fn x(&self, k: usize) -> Result<f64> {
        let u = self.u(k);
        Ok(u / nonzero(self.c - self.a * u, "c - a(a + b q^k)", k as i64)?)
    }

    /// The rational prefactor `(c-(a+1)(a+b))(c-u_k^2) / ((c-(a+1)u_k)(c-(a+b)u_k))`.
    fn rational_factor(&self, k: usize) -> Result<f64> {
        let (a, b, c) = (self.a, self.b, self.c);
        let u = self.u(k);
        let d1 = nonzero(c - (a + 1.0) * u, "c - (a+1)(a + b q^k)", k as i64)?;
        let d2 = nonzero(c - (a + b) * u, "c - (a+b)(a + b q^k)", k as i64)?;
        Ok((c - (a + 1.0) * (a + b)) / d1 * (c - u * u) / d2)
    }

    /// Summand core `P_k (b, X_k; q)_k (X_k b^2 q^(k+1); q)_inf / ((q;q)_k (X_k b q; q)_inf)`.
    fn core(&self, k: usize, policy: &TruncationPolicy) -> Result<(f64, f64)> {
        let (b, q) = (self.b, self.q);
        let qv = q.get();
        let x = self.x(k)?;
        let kk = k as i64;
        let num = pfin(b, q, kk)? * pfin(x, q, kk)? * pinf(x * b * b * q.powi(kk + 1), q, policy)?;
        let den = pfin(qv, q, kk)? * pinf(x * b * qv, q, policy)?;
        Ok((self.rational_factor(k)? * num / nonzero(den, "(q;q)_k (X_k b q; q)_inf", kk)?, x))
    }

    fn curious_term(&self, k: usize, policy: &TruncationPolicy) -> Result<f64> {
        Ok(self.core(k, policy)?.0 * (self.b * self.q.get()).powi(k as i32))
    }
}

/// Right-hand side of the curious expansion of `(b^2 q; q)_inf / (b q; q)_inf`.
pub fn curious_expansion_sum(p: &CuriousParams, policy: &TruncationPolicy) -> Result<SeriesValue> {
    sum_terms(policy, |k| p.curious_term(k, policy))
}

fn curious_lhs(p: &CuriousParams, policy: &TruncationPolicy) -> Result<f64> {
    let (b, q) = (p.b, p.q);
    require((b * q.get()).abs() < 1.0, "the expansion needs |bq| < 1")?;
    Ok(pinf(b * b * q.get(), q, policy)? / nonzero(pinf(b * q.get(), q, policy)?, "(bq;q)_inf", 0)?)
}

/// `(b^2 q; q)_inf / (bq; q)_inf` against its expansion in `u_k = a + b q^k`.
pub fn check_curious_expansion(p: &CuriousParams, policy: &TruncationPolicy) -> CheckResult {
    settle((|| {
        let lhs = curious_lhs(p, policy)?;
        let rhs = curious_expansion_sum(p, policy)?;
        Ok(CheckResult::compare(lhs, rhs.value, rhs.terms, EXPANSION_TOL))
    })())
}

/// At `c = 0` the expansion is the q-Gauss series
/// `2phi1(b, -1/a; -b^2 q/a; q, bq)` times `(-b^2 q/a; q)_inf / (-bq/a; q)_inf`.
pub fn check_curious_expansion_c0(a: f64, b: f64, q: Base, policy: &TruncationPolicy) -> CheckResult {
    settle((|| {
        let p = CuriousParams::new(a, b, 0.0, q);
        let sum = curious_expansion_sum(&p, policy)?;
        let qv = q.get();
        let (ga, gb, gc) = (b, -1.0 / a, -b * b * qv / a);
        let gauss = super::check_q_gauss(ga, gb, gc, q, policy);
        if !matches!(gauss.status, crate::check::Status::Pass | crate::check::Status::Fail) {
            return Ok(gauss);
        }
        let factor = pinf(gc, q, policy)? / nonzero(pinf(-b * qv / a, q, policy)?, "(-bq/a;q)_inf", 0)?;
        Ok(CheckResult::compare(sum.value, gauss.lhs * factor, sum.terms, EXPANSION_TOL)
            .and(CheckResult::compare(sum.value, gauss.rhs * factor, 0, EXPANSION_TOL), "q-Gauss product"))
    })())
}

/// At `a = 0` the expansion is a very-well-poised `8phi7` summation, up to
/// the factor `(b^3 q/c; q)_inf / (b^2 q/c; q)_inf`.
pub fn check_curious_expansion_a0(b: f64, c: f64, q: Base, policy: &TruncationPolicy) -> CheckResult {
    settle((|| {
        let qv = q.get();
        let sum = curious_expansion_sum(&CuriousParams::new(0.0, b, c, q), policy)?;
        let s = b * b / c;
        let vwp = sum_terms(policy, |k| {
            let kk = k as i64;
            let num =
                (1.0 - s * q.powi(2 * kk)) / (1.0 - s) * pfin(s, q, kk)? * pfin(b, q, kk)? * pfin(b / c, q, 2 * kk)?;
            let den = pfin(qv, q, kk)? * pfin(b * qv / c, q, kk)? * pfin(b * b * b * qv / c, q, 2 * kk)?;
            Ok(num / nonzero(den, "8phi7 denominator", kk)? * (b * qv).powi(k as i32))
        })?;
        let product = pinf(b * b * qv, q, policy)? * pinf(s * qv, q, policy)?
            / nonzero(pinf(b * qv, q, policy)? * pinf(b * s * qv, q, policy)?, "8phi7 product denominator", 0)?;
        let factor = pinf(b * s * qv, q, policy)? / nonzero(pinf(s * qv, q, policy)?, "(b^2 q/c;q)_inf", 0)?;
        Ok(CheckResult::compare(sum.value, factor * vwp.value, sum.terms + vwp.terms, EXPANSION_TOL)
            .and(CheckResult::compare(vwp.value, product, 0, EXPANSION_TOL), "8phi7 product"))
    })())
}

fn base_q2_sum(p: &CuriousParams, policy: &TruncationPolicy) -> Result<SeriesValue> {
    let (b, q) = (p.b, p.q);
    let (qv, q2) = (q.get(), q.squared());
    sum_terms(policy, |k| {
        let kk = k as i64;
        let x = p.x(k)?;
        let qk = q.powi(kk);
        let num = pfin(b, q, kk)? * pinf(x, q, policy)? * pinf(x * b * b * qk * qv * qv, q2, policy)?;
        let den = pfin(qv, q, kk)? * pinf(x * b * qv, q, policy)? * pinf(x * qk, q2, policy)?;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        Ok(p.rational_factor(k)? * num / nonzero(den, "base-q^2 expansion denominator", kk)? * sign * qk)
    })
}

/// `(-bq; q)_inf / (-q; q)_inf` expanded with mixed base-`q` and base-`q^2` products.
pub fn check_curious_base_q2(p: &CuriousParams, policy: &TruncationPolicy) -> CheckResult {
    settle((|| {
        let (b, q) = (p.b, p.q);
        let lhs = pinf(-b * q.get(), q, policy)? / pinf(-q.get(), q, policy)?;
        let rhs = base_q2_sum(p, policy)?;
        Ok(CheckResult::compare(lhs, rhs.value, rhs.terms, EXPANSION_TOL))
    })())
}

struct Quadratic {
    lhs: f64,
    sum: SeriesValue,
    split: f64,
}

fn quadratic(a: f64, b: f64, q: Base, policy: &TruncationPolicy) -> Result<Quadratic> {
    require(a.abs() < 1.0, "the quadratic expansion needs |a| < 1")?;
    let (qv, q2) = (q.get(), q.squared());
    let q2v = q2.get();
    let lhs = pinf(-b * qv, q, policy)? * pinf(a * b * qv, q, policy)?
        / nonzero(pinf(-qv, q, policy)? * pinf(a, q, policy)?, "(-q, a; q)_inf", 0)?;
    let sum = sum_terms(policy, |k| {
        let kk = k as i64;
        let qk = q.powi(kk);
        let t = pfin(b, q, kk)? / pfin(qv, q, kk)? * pinf(a * b * b * qk * q2v, q2, policy)?
            / nonzero(pinf(a * qk, q2, policy)?, "(a q^k; q^2)_inf", kk)?;
        Ok(if k % 2 == 0 { t * qk } else { -t * qk })
    })?;
    let inner = policy.tightened();
    let even = eval_series(&SeriesSpec::basic(vec![b, b * qv, a], vec![qv, a * b * b * q2v], q2, q2v)?, &inner)?;
    let odd = eval_series(
        &SeriesSpec::basic(vec![b * qv, b * q2v, a * qv], vec![qv * q2v, a * b * b * qv * q2v], q2, q2v)?,
        &inner,
    )?;
    let split = pinf(a * b * b * q2v, q2, policy)? / pinf(a, q2, policy)? * even.value
        - qv * (1.0 - b) / (1.0 - qv) * pinf(a * b * b * qv * q2v, q2, policy)? / pinf(a * qv, q2, policy)? * odd.value;
    Ok(Quadratic { lhs, sum, split })
}

/// The quadratic expansion with base-`q^2` products in the summand, and its
/// split into even and odd `3phi2` series in base `q^2`.
pub fn check_quadratic_expansion(a: f64, b: f64, q: Base, policy: &TruncationPolicy) -> CheckResult {
    settle(quadratic(a, b, q, policy).map(|r| {
        CheckResult::compare(r.lhs, r.sum.value, r.sum.terms, EXPANSION_TOL)
            .and(CheckResult::compare(r.split, r.sum.value, 0, EXPANSION_TOL), "parity split")
    }))
}

/// At `c = 0` and `a -> -1/a` the base-`q^2` expansion becomes the quadratic one.
pub fn check_base_q2_reduces_to_quadratic(a: f64, b: f64, q: Base, policy: &TruncationPolicy) -> CheckResult {
    settle((|| {
        let big = base_q2_sum(&CuriousParams::new(-1.0 / a, b, 0.0, q), policy)?;
        let quad = quadratic(a, b, q, policy)?;
        let factor = pinf(a, q, policy)? / nonzero(pinf(a * b * q.get(), q, policy)?, "(abq;q)_inf", 0)?;
        Ok(CheckResult::compare(big.value, quad.sum.value * factor, big.terms + quad.sum.terms, EXPANSION_TOL))
    })())
}

fn phi21_sum(p: &CuriousParams, z: f64, policy: &TruncationPolicy) -> Result<SeriesValue> {
    let (b, q) = (p.b, p.q);
    let qv = q.get();
    require((z / b).abs() < 1.0, "the 2phi1 expansion needs |z/b| < 1")?;
    let inner_policy = policy.tightened();
    sum_terms(policy, |k| {
        let (core, x) = p.core(k, policy)?;
        let arg = x * b * b * q.powi(k as i64 + 1);
        let spec = SeriesSpec::basic(vec![1.0 / b, z / (b * b * qv)], vec![z / b], q, arg)?;
        let inner = eval_series(&spec, &inner_policy)?;
        Ok(core * inner.value * (z / b).powi(k as i32))
    })
}

/// `(z; q)_inf / (z/b; q)_inf` with an inner `2phi1` in every summand.
pub fn check_curious_phi21(p: &CuriousParams, z: f64, policy: &TruncationPolicy) -> CheckResult {
    settle((|| {
        let q = p.q;
        let rhs = phi21_sum(p, z, policy)?;
        let lhs = pinf(z, q, policy)? / nonzero(pinf(z / p.b, q, policy)?, "(z/b;q)_inf", 0)?;
        Ok(CheckResult::compare(lhs, rhs.value, rhs.terms, EXPANSION_TOL))
    })())
}

/// `z = b^2 q` turns the inner `2phi1` into 1 and recovers the curious expansion.
pub fn check_phi21_reduces_to_curious(p: &CuriousParams, policy: &TruncationPolicy) -> CheckResult {
    settle((|| {
        let z = p.b * p.b * p.q.get();
        let gen = phi21_sum(p, z, policy)?;
        let base = curious_expansion_sum(p, policy)?;
        Ok(CheckResult::compare(gen.value, base.value, gen.terms + base.terms, EXPANSION_TOL))
    })())
}

/// `z = -bq` recovers the base-`q^2` expansion.
pub fn check_phi21_reduces_to_base_q2(p: &CuriousParams, policy: &TruncationPolicy) -> CheckResult {
    settle((|| {
        let gen = phi21_sum(p, -p.b * p.q.get(), policy)?;
        let base = base_q2_sum(p, policy)?;
        Ok(CheckResult::compare(gen.value, base.value, gen.terms + base.terms, EXPANSION_TOL))
    })())
}

impl CuriousParams {
    fn phi32_term(&self, e: f64, m: usize, k: usize, policy: &TruncationPolicy) -> Result<f64> {
        let (b, q) = (self.b, self.q);
        let (core, x) = self.core(k, policy)?;
        let kk = k as i64;
        let qk = q.powi(kk);
        let qm = q.powi(m as i64);
        let spec = SeriesSpec::basic(vec![1.0 / b, x * qk, 1.0 / qm], vec![1.0 / (b * b), e * qk], q, q.get())?;
        let inner = eval_series(&spec, &policy.tightened())?;
        let ratio = pfin(e * qm, q, kk)? / nonzero(pfin(e, q, kk)?, "(e;q)_k", kk)?;
        Ok(core * inner.value * ratio * (b * q.get() / qm).powi(k as i32))
    }
}

fn phi32_sum(p: &CuriousParams, e: f64, m: usize, policy: &TruncationPolicy) -> Result<SeriesValue> {
    require((p.b * p.q.get() / p.q.powi(m as i64)).abs() < 1.0, "the 3phi2 expansion needs |b q^(1-m)| < 1")?;
    sum_terms(policy, |k| p.phi32_term(e, m, k, policy))
}

/// `(b^2 q; q)_inf / (bq; q)_inf` with an inner terminating `3phi2` in every summand.
pub fn check_curious_phi32(p: &CuriousParams, e: f64, m: usize, policy: &TruncationPolicy) -> CheckResult {
    settle((|| {
        let lhs = curious_lhs(p, policy)?;
        let rhs = phi32_sum(p, e, m, policy)?;
        Ok(CheckResult::compare(lhs, rhs.value, rhs.terms, EXPANSION_TOL))
    })())
}

/// `m = 0` recovers the curious expansion for every `e`.
pub fn check_phi32_m0(p: &CuriousParams, e: f64, policy: &TruncationPolicy) -> CheckResult {
    settle((|| {
        let gen = phi32_sum(p, e, 0, policy)?;
        let base = curious_expansion_sum(p, policy)?;
        Ok(CheckResult::compare(gen.value, base.value, gen.terms + base.terms, EXPANSION_TOL))
    })())
}

/// Surrogates for `e -> infinity`.
pub const LARGE_SURROGATES: [f64; 3] = [1e4, 1e6, 1e8];

/// As `e` grows the summands approach those of the curious expansion.
///
/// The largest summand difference over `k` must shrink strictly along
/// [`LARGE_SURROGATES`]; the sums are compared at the largest surrogate.
pub fn check_phi32_large_e(p: &CuriousParams, m: usize, policy: &TruncationPolicy) -> CheckResult {
    settle((|| {
        let base = curious_expansion_sum(p, policy)?;
        let mut deviations = Vec::with_capacity(LARGE_SURROGATES.len());
        for &e in &LARGE_SURROGATES {
            let mut worst = 0f64;
            for k in 0..base.terms {
                let d = p.phi32_term(e, m, k, policy)? - p.curious_term(k, policy)?;
                worst = worst.max(d.abs());
            }
            deviations.push(worst / base.value.abs());
        }
        let far = phi32_sum(p, LARGE_SURROGATES[2], m, policy)?;
        let mut r = CheckResult::compare(far.value, base.value, far.terms, EXPANSION_TOL);
        let shrinking = deviations.windows(2).all(|w| w[1] < w[0] || w[1] == 0.0);
        if !shrinking {
            r.status = crate::check::Status::Fail;
        }
        Ok(r.with_diagnostic(format!(
            "summand deviation by e: {:?}",
            deviations.iter().map(|d| format!("{d:.3e}")).collect::<Vec<_>>()
        )))
    })())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: f64) -> Base {
        Base::new(v).unwrap()
    }

    fn pol() -> TruncationPolicy {
        TruncationPolicy::default()
    }

    #[test]
    fn curious_examples() {
        let p = CuriousParams::new(1.0, 0.3, 10.0, q(0.5));
        let r = check_curious_expansion(&p, &pol());
        assert!(r.rel_err <= 1e-9, "{r:?}");
        assert!(check_curious_expansion_c0(0.7, 0.3, q(0.5), &pol()).passed());
        let r = check_curious_expansion_a0(0.3, 10.0, q(0.5), &pol());
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn base_q2_examples() {
        let r = check_curious_base_q2(&CuriousParams::new(0.4, 0.6, 8.0, q(0.5)), &pol());
        assert!(r.rel_err <= 1e-9, "{r:?}");
        let r = check_curious_base_q2(&CuriousParams::new(0.4, 1.0, 8.0, q(0.5)), &pol());
        assert!((r.lhs - 1.0).abs() < 1e-15 && (r.rhs - 1.0).abs() < 1e-14, "{r:?}");
        assert!(check_base_q2_reduces_to_quadratic(0.3, 0.7, q(0.5), &pol()).passed());
    }

    #[test]
    fn quadratic_examples() {
        let r = check_quadratic_expansion(0.2, 0.7, q(0.5), &pol());
        assert!(r.passed() && r.rel_err <= 1e-10, "{r:?}");
        let r = check_quadratic_expansion(0.3, 1.0, q(0.5), &pol());
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn phi21_examples() {
        let p = CuriousParams::new(1.0, 0.5, 12.0, q(0.5));
        let r = check_curious_phi21(&p, 0.2, &pol());
        assert!(r.rel_err <= 1e-8, "{r:?}");
        let p = CuriousParams::new(0.2, 0.3, 5.0, q(0.5));
        assert!(check_phi21_reduces_to_curious(&p, &pol()).passed());
        assert!(check_phi21_reduces_to_base_q2(&p, &pol()).passed());
    }

    #[test]
    fn phi32_examples() {
        let p = CuriousParams::new(0.8, 0.2, 9.0, q(0.5));
        let r = check_curious_phi32(&p, 0.3, 2, &pol());
        assert!(r.rel_err <= 1e-8, "{r:?}");
        assert!(check_phi32_m0(&p, 0.3, &pol()).passed());
        let r = check_phi32_large_e(&p, 2, &pol());
        assert!(r.passed(), "{r:?}");
    }
}
