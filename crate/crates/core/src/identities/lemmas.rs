use crate::check::{settle, CheckResult};
use crate::error::Result;
use crate::qcore::{eval_series, qpoch_infinite as pinf, Base, SeriesSpec, TruncationPolicy};

use super::{nonzero, require, LEMMA_TOL};

/// q-Gauss: `2phi1(a, b; c; q, c/ab) = (c/a, c/b; q)_inf / (c, c/ab; q)_inf`.
pub fn check_q_gauss(a: f64, b: f64, c: f64, q: Base, policy: &TruncationPolicy) -> CheckResult {
    settle(q_gauss(a, b, c, q, policy))
}

fn q_gauss(a: f64, b: f64, c: f64, q: Base, policy: &TruncationPolicy) -> Result<CheckResult> {
    let z = c / nonzero(a * b, "ab", 0)?;
    require(z.abs() < 1.0, "q-Gauss needs |c/ab| < 1")?;
    let lhs = eval_series(&SeriesSpec::basic(vec![a, b], vec![c], q, z)?, policy)?;
    let rhs = pinf(c / a, q, policy)? * pinf(c / b, q, policy)?
        / nonzero(pinf(c, q, policy)? * pinf(z, q, policy)?, "(c, c/ab; q)_inf", 0)?;
    Ok(CheckResult::compare(lhs.value, rhs, lhs.terms, LEMMA_TOL))
}

/// q-Kummer: `2phi1(a, b; aq/b; q, -q/b)` against its product with base-`q^2` factors.
pub fn check_q_kummer(a: f64, b: f64, q: Base, policy: &TruncationPolicy) -> CheckResult {
    settle(q_kummer(a, b, q, policy).map(|(l, r, t)| CheckResult::compare(l, r, t, LEMMA_TOL)))
}

fn q_kummer(a: f64, b: f64, q: Base, policy: &TruncationPolicy) -> Result<(f64, f64, usize)> {
    let qv = q.get();
    require((qv / b).abs() < 1.0, "q-Kummer needs |q/b| < 1")?;
    let lhs = eval_series(&SeriesSpec::basic(vec![a, b], vec![a * qv / b], q, -qv / b)?, policy)?;
    let q2 = q.squared();
    let rhs = pinf(-qv, q, policy)? * pinf(a * qv, q2, policy)? * pinf(a * qv * qv / (b * b), q2, policy)?
        / nonzero(pinf(-qv / b, q, policy)? * pinf(a * qv / b, q, policy)?, "(-q/b, aq/b; q)_inf", 0)?;
    Ok((lhs.value, rhs, lhs.terms))
}

fn rogers(a: f64, b: f64, c: f64, d: f64, q: Base, policy: &TruncationPolicy) -> Result<(f64, f64, usize)> {
    require(a > 0.0, "the very-well-poised 6phi5 needs a > 0 for real sqrt(a)")?;
    let qv = q.get();
    let z = a * qv / nonzero(b * c * d, "bcd", 0)?;
    require(z.abs() < 1.0, "Rogers' 6phi5 needs |aq/bcd| < 1")?;
    let s = a.sqrt();
    let spec =
        SeriesSpec::basic(vec![a, qv * s, -qv * s, b, c, d], vec![s, -s, a * qv / b, a * qv / c, a * qv / d], q, z)?;
    let lhs = eval_series(&spec, policy)?;
    let aq = a * qv;
    let num = pinf(aq, q, policy)?
        * pinf(aq / (b * c), q, policy)?
        * pinf(aq / (b * d), q, policy)?
        * pinf(aq / (c * d), q, policy)?;
    let den = pinf(aq / b, q, policy)? * pinf(aq / c, q, policy)? * pinf(aq / d, q, policy)? * pinf(z, q, policy)?;
    Ok((lhs.value, num / nonzero(den, "6phi5 product denominator", 0)?, lhs.terms))
}

/// Rogers' nonterminating very-well-poised `6phi5` summation.
pub fn check_rogers_6phi5(a: f64, b: f64, c: f64, d: f64, q: Base, policy: &TruncationPolicy) -> CheckResult {
    settle(rogers(a, b, c, d, q, policy).map(|(l, r, t)| CheckResult::compare(l, r, t, LEMMA_TOL)))
}

/// Setting `c = sqrt(a)`, `d = -sqrt(a)` in the `6phi5` reproduces q-Kummer on both sides.
pub fn check_rogers_to_kummer(a: f64, b: f64, q: Base, policy: &TruncationPolicy) -> CheckResult {
    settle((|| {
        let s = a.sqrt();
        let (rl, rr, rt) = rogers(a, b, s, -s, q, policy)?;
        let (kl, kr, kt) = q_kummer(a, b, q, policy)?;
        Ok(CheckResult::compare(rl, kl, rt + kt, LEMMA_TOL)
            .and(CheckResult::compare(rr, kr, 0, LEMMA_TOL), "product side"))
    })())
}

/// Second iterate of Heine's transformation.
pub fn check_heine(a: f64, b: f64, c: f64, z: f64, q: Base, policy: &TruncationPolicy) -> CheckResult {
    settle((|| {
        require(z.abs() < 1.0 && (c / b).abs() < 1.0, "Heine's transformation needs |z|, |c/b| < 1")?;
        let lhs = eval_series(&SeriesSpec::basic(vec![a, b], vec![c], q, z)?, policy)?;
        let right = eval_series(&SeriesSpec::basic(vec![a * b * z / c, b], vec![b * z], q, c / b)?, policy)?;
        let pre = pinf(c / b, q, policy)? * pinf(b * z, q, policy)?
            / nonzero(pinf(c, q, policy)? * pinf(z, q, policy)?, "(c, z; q)_inf", 0)?;
        Ok(CheckResult::compare(lhs.value, pre * right.value, lhs.terms + right.terms, LEMMA_TOL))
    })())
}

fn finite_3phi2(
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    m: usize,
    q: Base,
    policy: &TruncationPolicy,
) -> Result<(f64, f64, f64, usize)> {
    let qm = q.powi(m as i64);
    let z = c / (qm * nonzero(a * b, "ab", 0)?);
    require(z.abs() < 1.0, "the (m+1)-term 3phi2 sum needs |c q^-m / ab| < 1")?;
    let lhs = eval_series(&SeriesSpec::basic(vec![a, b, d * qm], vec![c, d], q, z)?, policy)?;
    let fin = eval_series(&SeriesSpec::basic(vec![a, b, 1.0 / qm], vec![a * b * q.get() / c, d], q, q.get())?, policy)?;
    let pre = pinf(c / a, q, policy)? * pinf(c / b, q, policy)?
        / nonzero(pinf(c, q, policy)? * pinf(c / (a * b), q, policy)?, "(c, c/ab; q)_inf", 0)?;
    Ok((lhs.value, pre, fin.value, lhs.terms + fin.terms))
}

/// The `(m+1)`-term `3phi2` summation with a nonterminating left side.
pub fn check_finite_3phi2(a: f64, b: f64, c: f64, d: f64, m: usize, q: Base, policy: &TruncationPolicy) -> CheckResult {
    settle(
        finite_3phi2(a, b, c, d, m, q, policy).map(|(l, pre, fin, t)| CheckResult::compare(l, pre * fin, t, LEMMA_TOL)),
    )
}

/// At `m = 0` the `3phi2` sum collapses to q-Gauss.
pub fn check_finite_3phi2_m0(a: f64, b: f64, c: f64, d: f64, q: Base, policy: &TruncationPolicy) -> CheckResult {
    settle((|| {
        let (lhs, pre, fin, t) = finite_3phi2(a, b, c, d, 0, q, policy)?;
        let gauss = q_gauss(a, b, c, q, policy)?;
        Ok(CheckResult::compare(lhs, gauss.lhs, t, LEMMA_TOL)
            .and(CheckResult::compare(pre * fin, gauss.rhs, 0, LEMMA_TOL), "product side"))
    })())
}

/// At `m = 1` the finite side is `1 - (1-a)(1-b) / ((1 - abq/c)(1-d))`.
pub fn check_finite_3phi2_m1(a: f64, b: f64, c: f64, d: f64, q: Base, policy: &TruncationPolicy) -> CheckResult {
    settle((|| {
        let (lhs, pre, fin, t) = finite_3phi2(a, b, c, d, 1, q, policy)?;
        let closed = 1.0 - (1.0 - a) * (1.0 - b) / ((1.0 - a * b * q.get() / c) * (1.0 - d));
        Ok(CheckResult::compare(fin, closed, t, LEMMA_TOL)
            .and(CheckResult::compare(lhs, pre * closed, 0, LEMMA_TOL), "full sum"))
    })())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::Status;
    use crate::qcore::qpoch_finite;

    fn q(v: f64) -> Base {
        Base::new(v).unwrap()
    }

    fn pol() -> TruncationPolicy {
        TruncationPolicy::default()
    }

    /// 500-term sum built from explicit Pochhammer values.
    fn brute_phi(num: &[f64], den: &[f64], qq: f64, z: f64) -> f64 {
        (0..500i64)
            .map(|k| {
                let n: f64 = num.iter().map(|&a| qpoch_finite(a, q(qq), k).unwrap()).product();
                let d: f64 = den.iter().map(|&b| qpoch_finite(b, q(qq), k).unwrap()).product::<f64>()
                    * qpoch_finite(qq, q(qq), k).unwrap();
                n / d * z.powi(k as i32)
            })
            .take_while(|t| t.is_finite())
            .sum()
    }

    #[test]
    fn q_gauss_examples() {
        let r = check_q_gauss(0.7, 1.0, 0.4, q(0.5), &pol());
        assert!((r.lhs - 1.0).abs() < 1e-15 && (r.rhs - 1.0).abs() < 1e-15);
        let r = check_q_gauss(3.0, 4.0, 0.6, q(0.5), &pol());
        assert!(r.rel_err <= 1e-10, "{r:?}");
        assert!((r.lhs - brute_phi(&[3.0, 4.0], &[0.6], 0.5, 0.05)).abs() < 1e-13);
        assert!(check_q_gauss(2.0, 2.0, 0.9, q(0.8), &pol()).rel_err <= 1e-9);
        assert_eq!(check_q_gauss(0.5, 0.5, 0.9, q(0.5), &pol()).status, Status::SkippedPole);
    }

    #[test]
    fn q_kummer_examples() {
        let r = check_q_kummer(0.0, 4.0, q(0.5), &pol());
        assert!(r.rel_err <= 1e-10, "{r:?}");
        let r = check_q_kummer(0.3, 100.0, q(0.5), &pol());
        assert!(r.rel_err <= 1e-9, "{r:?}");
        let r = check_q_kummer(0.25, 4.0, q(0.5), &pol());
        assert!((r.lhs - brute_phi(&[0.25, 4.0], &[0.25 * 0.5 / 4.0], 0.5, -0.125)).abs() < 1e-13);
        assert_eq!(check_q_kummer(0.3, 0.2, q(0.5), &pol()).status, Status::SkippedPole);
    }

    #[test]
    fn rogers_examples() {
        // b = q^0 = 1 terminates at k = 0, and the products cancel.
        let r = check_rogers_6phi5(0.09, 1.0, 3.0, 4.0, q(0.5), &pol());
        assert_eq!(r.lhs, 1.0);
        assert!(r.passed(), "{r:?}");
        assert!(check_rogers_6phi5(0.09, 2.0, 3.0, 4.0, q(0.5), &pol()).rel_err <= 1e-10);
        assert!(check_rogers_to_kummer(0.25, 4.0, q(0.5), &pol()).passed());
        assert_eq!(check_rogers_6phi5(-0.2, 2.0, 3.0, 4.0, q(0.5), &pol()).status, Status::SkippedPole);
    }

    #[test]
    fn heine_examples() {
        let r = check_heine(0.3, 2.0, 0.5, 0.0, q(0.5), &pol());
        assert_eq!(r.lhs, 1.0);
        assert!((r.rhs - 1.0).abs() < 1e-15);
        assert!(check_heine(0.3, 2.0, 0.3, 0.4, q(0.5), &pol()).rel_err <= 1e-10);
        assert!(check_heine(0.2, 5.0, 0.7, 0.5, q(0.6), &pol()).rel_err <= 1e-10);
    }

    #[test]
    fn finite_3phi2_examples() {
        for m in 0..4 {
            let r = check_finite_3phi2(2.0, 3.0, 0.4, 0.15, m, q(0.5), &pol());
            assert!(r.rel_err <= 1e-9, "m={m}: {r:?}");
        }
        assert!(check_finite_3phi2_m0(2.0, 3.0, 0.4, 0.15, q(0.5), &pol()).passed());
        assert!(check_finite_3phi2_m1(2.0, 3.0, 0.4, 0.15, q(0.5), &pol()).passed());
    }
}
