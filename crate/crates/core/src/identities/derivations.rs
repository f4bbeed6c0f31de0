//! The rotated inverse relations that produce the expansions: a known
//! summation gives `sum_{n>=k} f_nk a_n = b_k`, and the inverse matrix turns it
//! into `sum_{k>=l} g_kl b_k = a_l`.

use std::sync::Arc;

use crate::check::{settle, CheckResult};
use crate::error::Result;
use crate::inversion::{apply_inverse_relation, seq, Direction, InverseRelationCase, MatrixPair, Seq};
use crate::qcore::{eval_series, qpoch_finite, qpoch_infinite as pinf, SeriesSpec, TruncationPolicy};

use super::{require, CuriousParams};

/// Tolerance for both directions of the inverse relations.
pub const RELATION_TOL: f64 = 1e-9;

/// `X_k = (a + b q^k) / (c - a(a + b q^k))`.
fn x_of(p: &CuriousParams, k: i64) -> f64 {
    let u = p.a + p.b * p.q.powi(k);
    u / (p.c - p.a * u)
}

fn run(
    p: &CuriousParams,
    a_seq: Seq<f64>,
    b_seq: Seq<f64>,
    l: i64,
    direction: Direction,
    policy: &TruncationPolicy,
) -> Result<CheckResult> {
    let case = InverseRelationCase {
        pair: MatrixPair::Special { a: p.a, b: p.b, c: p.c, q: p.q.get() },
        a_seq,
        b_seq,
        direction,
        policy: *policy,
    };
    apply_inverse_relation(&case, l, RELATION_TOL)
}

fn or_nan(r: Result<f64>) -> f64 {
    r.unwrap_or(f64::NAN)
}

/// q-Kummer in rotated form, with `a_n = (-bq)^n`; its inverse gives the
/// base-`q^2` expansion.
pub fn check_base_q2_derivation(
    p: &CuriousParams,
    l: i64,
    direction: Direction,
    policy: &TruncationPolicy,
) -> CheckResult {
    settle((|| {
        let (b, q) = (p.b, p.q);
        let qv = q.get();
        let pol = *policy;
        let pp = *p;
        let ratio = pinf(-qv, q, policy)? / pinf(-b * qv, q, policy)?;
        let a_seq = seq(move |n| (-b * qv).powi(n as i32));
        let b_seq = seq(move |k| {
            or_nan((|| {
                let x = x_of(&pp, k);
                let q2 = q.squared();
                let qk1 = q.powi(k + 1);
                Ok((-b * qv).powi(k as i32) * ratio * pinf(x * qk1, q2, &pol)? * pinf(x * b * b * qk1 * qv, q2, &pol)?
                    / pinf(x * b * qk1, q, &pol)?)
            })())
        });
        run(p, a_seq, b_seq, l, direction, policy)
    })())
}

/// Heine's transformation in rotated form, with `a_n = z^n`.
pub fn check_phi21_derivation(
    p: &CuriousParams,
    z: f64,
    l: i64,
    direction: Direction,
    policy: &TruncationPolicy,
) -> CheckResult {
    settle((|| {
        let (b, q) = (p.b, p.q);
        require(z.abs() < 1.0 && (z / b).abs() < 1.0, "needs |z| < 1 and |z/b| < 1")?;
        let qv = q.get();
        let pol = *policy;
        let pp = *p;
        let ratio = pinf(z / b, q, policy)? / pinf(z, q, policy)?;
        let a_seq = seq(move |n| z.powi(n as i32));
        let b_seq = seq(move |k| {
            or_nan((|| {
                let x = x_of(&pp, k);
                let arg = x * b * b * q.powi(k + 1);
                let inner = eval_series(
                    &SeriesSpec::basic(vec![1.0 / b, z / (b * b * qv)], vec![z / b], q, arg)?,
                    &pol.tightened(),
                )?;
                Ok(z.powi(k as i32) * ratio * pinf(arg, q, &pol)? / pinf(x * b * q.powi(k + 1), q, &pol)? * inner.value)
            })())
        });
        run(p, a_seq, b_seq, l, direction, policy)
    })())
}

/// The `(m+1)`-term `3phi2` sum in rotated form, with
/// `a_n = (e q^m; q)_n / (e; q)_n (b^2 q^(1-m))^n`.
pub fn check_phi32_derivation(
    p: &CuriousParams,
    e: f64,
    m: usize,
    l: i64,
    direction: Direction,
    policy: &TruncationPolicy,
) -> CheckResult {
    settle((|| {
        let (b, q) = (p.b, p.q);
        let qv = q.get();
        let qm = q.powi(m as i64);
        let w = b * b * qv / qm;
        require(w.abs() < 1.0, "needs |b^2 q^(1-m)| < 1")?;
        let pol = *policy;
        let pp = *p;
        let ratio = pinf(b * qv, q, policy)? / pinf(b * b * qv, q, policy)?;
        let e_ratio =
            Arc::new(move |n: i64| -> Result<f64> { Ok(qpoch_finite(e * qm, q, n)? / qpoch_finite(e, q, n)?) });
        let er = e_ratio.clone();
        let a_seq = seq(move |n| or_nan(er(n)) * w.powi(n as i32));
        let b_seq = seq(move |k| {
            or_nan((|| {
                let x = x_of(&pp, k);
                let qk = q.powi(k);
                let spec = SeriesSpec::basic(vec![1.0 / b, x * qk, 1.0 / qm], vec![1.0 / (b * b), e * qk], q, qv)?;
                let inner = eval_series(&spec, &pol.tightened())?;
                let prod = pinf(x * b * b * qk * qv, q, &pol)? / pinf(x * b * qk * qv, q, &pol)?;
                Ok(inner.value * e_ratio(k)? * ratio * prod * w.powi(k as i32))
            })())
        });
        run(p, a_seq, b_seq, l, direction, policy)
    })())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::Base;

    fn params() -> CuriousParams {
        CuriousParams::new(0.2, 0.3, 5.0, Base::new(0.5).unwrap())
    }

    #[test]
    fn kummer_route_both_directions() {
        let pol = TruncationPolicy::default();
        for l in 0..3 {
            for dir in [Direction::FToG, Direction::GToF] {
                let r = check_base_q2_derivation(&params(), l, dir, &pol);
                assert!(r.passed(), "l={l} {dir:?}: {r:?}");
            }
        }
    }

    #[test]
    fn heine_route_both_directions() {
        let pol = TruncationPolicy::default();
        for dir in [Direction::FToG, Direction::GToF] {
            let r = check_phi21_derivation(&params(), 0.2, 0, dir, &pol);
            assert!(r.passed(), "{dir:?}: {r:?}");
        }
    }

    #[test]
    fn three_phi_two_route_both_directions() {
        let pol = TruncationPolicy::default();
        for dir in [Direction::FToG, Direction::GToF] {
            let r = check_phi32_derivation(&params(), 0.3, 2, 1, dir, &pol);
            assert!(r.passed(), "{dir:?}: {r:?}");
        }
    }
}
