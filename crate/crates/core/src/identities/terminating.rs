use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::check::{settle, CheckResult};
use crate::error::{Error, Result};
use crate::inversion::{poch, powi, Scalar};
use crate::qcore::{eval_series, eval_series_exact, Base, ExactKind, ExactSeriesSpec, SeriesSpec, TruncationPolicy};
use crate::sum::NeumaierSum;

use super::TERMINATING_TOL;

fn nz<T: Scalar>(x: T, context: &'static str, index: i64) -> Result<T> {
    if x.is_zero() {
        Err(Error::ZeroDenominator { context, index })
    } else {
        Ok(x)
    }
}

/// Both sides of the terminating very-well-poised `10phi9` summation.
///
/// The square-root parameters are paired, `(sqrt x;q)_k (-sqrt x;q)_k = (x;q^2)_k`,
/// so the sum is rational in `a`, `b`, `q`.
pub fn ten_phi_nine_sides<T: Scalar>(a: &T, b: &T, n: usize, q: &T) -> Result<(T, T)> {
    let one = T::one();
    let ni = n as i64;
    let qn1 = powi(q, ni + 1)?;
    let qmn = powi(q, -ni)?;
    let a2 = a.clone() * a.clone();
    let b_inv = one.clone() / nz(b.clone(), "b", 0)?;
    let a_inv = one.clone() / nz(a.clone(), "a", 0)?;
    let vwp_den = nz(one.clone() - a.clone(), "1 - a", 0)?;
    let mut sum = T::zero();
    for k in 0..=ni {
        let q2k = powi(q, 2 * k)?;
        let num = poch(a, q, k)
            * (one.clone() - a.clone() * q2k)
            * poch(b, q, 2 * k)
            * poch(&(a.clone() * b_inv.clone()), q, k)
            * poch(&(a2.clone() * qn1.clone() * b_inv.clone()), q, k)
            * poch(&qmn, q, k);
        let den = vwp_den.clone()
            * poch(q, q, k)
            * poch(&(a2.clone() * q.clone() * b_inv.clone()), q, 2 * k)
            * poch(&(b.clone() * q.clone()), q, k)
            * poch(&(b.clone() * qmn.clone() * a_inv.clone()), q, k)
            * poch(&(a.clone() * qn1.clone()), q, k);
        sum = sum + num / nz(den, "10phi9 denominator", k)? * powi(q, k)?;
    }
    let rhs_num =
        poch(&(a.clone() * q.clone()), q, ni) * poch(&(a2.clone() * q.clone() * b_inv.clone() * b_inv.clone()), q, ni);
    let rhs_den = poch(&(a.clone() * q.clone() * b_inv.clone()), q, ni) * poch(&(a2 * q.clone() * b_inv), q, ni);
    Ok((sum, rhs_num / nz(rhs_den, "10phi9 product denominator", ni)?))
}

/// Floating check of the `10phi9` summation, through the paired form and
/// through the literal ten-parameter series with square roots.
pub fn check_10phi9(a: f64, b: f64, n: usize, q: Base, tolerance: f64) -> CheckResult {
    settle((|| {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::Domain("the 10phi9 needs a, b > 0 for real square roots".into()));
        }
        let qv = q.get();
        let (paired, rhs) = ten_phi_nine_sides(&a, &b, n, &qv)?;
        let (sa, sb, sbq, sqb) = (a.sqrt(), b.sqrt(), (b * qv).sqrt(), (qv / b).sqrt());
        let qn1 = q.powi(n as i64 + 1);
        let spec = SeriesSpec::basic(
            vec![a, qv * sa, -qv * sa, sb, -sb, sbq, -sbq, a / b, a * a * qn1 / b, q.powi(-(n as i64))],
            vec![sa, -sa, a * qv / sb, -a * qv / sb, a * sqb, -a * sqb, b * qv, b * q.powi(-(n as i64)) / a, a * qn1],
            q,
            qv,
        )?;
        let literal = eval_series(&spec, &TruncationPolicy::default())?;
        Ok(CheckResult::compare(paired, rhs, n + 1, tolerance)
            .and(CheckResult::compare(literal.value, rhs, literal.terms, tolerance), "literal 10phi9"))
    })())
}

fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let (n, d) = (x.numer(), x.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    (&rn * &rn == *n && &rd * &rd == *d).then(|| BigRational::new(rn, rd))
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Exact check of the `10phi9` summation. When `sqrt(a)`, `sqrt(b)`, `sqrt(bq)`
/// and `sqrt(q/b)` are all rational the literal series is summed exactly as well.
pub fn check_10phi9_exact(a: &BigRational, b: &BigRational, n: usize, q: &BigRational) -> CheckResult {
    settle((|| {
        let (sum, rhs) = ten_phi_nine_sides(a, b, n, q)?;
        let mut r = CheckResult::exact(to_f64(&sum), to_f64(&rhs), sum == rhs, n + 1);
        if let (Some(sa), Some(sb), Some(sbq), Some(sqb)) =
            (rational_sqrt(a), rational_sqrt(b), rational_sqrt(&(b * q)), rational_sqrt(&(q / b)))
        {
            let qn1 = powi(q, n as i64 + 1)?;
            let qmn = powi(q, -(n as i64))?;
            let spec = ExactSeriesSpec {
                numerator: vec![
                    a.clone(),
                    q * &sa,
                    -(q * &sa),
                    sb.clone(),
                    -sb.clone(),
                    sbq.clone(),
                    -sbq,
                    a / b,
                    a * a * &qn1 / b,
                    qmn.clone(),
                ],
                denominator: vec![
                    sa.clone(),
                    -sa,
                    a * q / &sb,
                    -(a * q / &sb),
                    a * &sqb,
                    -(a * &sqb),
                    b * q,
                    b * &qmn / a,
                    a * &qn1,
                ],
                argument: q.clone(),
                kind: ExactKind::Basic(q.clone()),
            };
            let literal = eval_series_exact(&spec)?;
            r = r.and(CheckResult::exact(to_f64(&literal), to_f64(&rhs), literal == rhs, n + 1), "literal 10phi9");
        }
        Ok(r)
    })())
}

/// Left side and the summands of the terminating curious sum, with
/// `w_k = a - q^-k` and `W_k = (b + a w_k) / w_k`.
fn curious_terminating_terms<T: Scalar>(a: &T, b: &T, c: &T, n: usize, q: &T) -> Result<(T, Vec<T>)> {
    let one = T::one();
    let ni = n as i64;
    let lhs =
        poch(&(c.clone() * c.clone() * q.clone()), q, ni) / nz(poch(&(c.clone() * q.clone()), q, ni), "(cq;q)_n", ni)?;
    let qmn = powi(q, -ni)?;
    let c_inv = one.clone() / nz(c.clone(), "c", 0)?;
    let lead = b.clone() + (a.clone() - c.clone()) * (a.clone() - one.clone());
    let mut terms = Vec::with_capacity(n + 1);
    for k in 0..=ni {
        let w = nz(a.clone() - powi(q, -k)?, "a - q^-k", k)?;
        let big_w = (b.clone() + a.clone() * w.clone()) / w.clone();
        let rational = lead.clone() / nz(b.clone() + (a.clone() - c.clone()) * w.clone(), "b + (a-c) w_k", k)?
            * (b.clone() + w.clone() * w.clone())
            / nz(b.clone() + (a.clone() - one.clone()) * w.clone(), "b + (a-1) w_k", k)?;
        let cqw = c.clone() * q.clone() * big_w.clone();
        let num = poch(&qmn, q, k)
            * poch(c, q, k)
            * poch(&((b.clone() + a.clone() * w.clone()) * c_inv.clone() / w), q, k)
            * poch(&cqw, q, ni);
        let den = poch(q, q, k)
            * poch(&(qmn.clone() * c_inv.clone()), q, k)
            * poch(&cqw, q, k)
            * poch(&(q.clone() * big_w), q, ni);
        terms.push(rational * num / nz(den, "terminating sum denominator", k)? * powi(q, k)?);
    }
    Ok((lhs, terms))
}

/// Both sides of the terminating curious sum.
pub fn curious_terminating_sides<T: Scalar>(a: &T, b: &T, c: &T, n: usize, q: &T) -> Result<(T, T)> {
    let (lhs, terms) = curious_terminating_terms(a, b, c, n, q)?;
    Ok((lhs, terms.into_iter().fold(T::zero(), |s, t| s + t)))
}

/// Floating check of the terminating curious sum, with compensated accumulation.
pub fn check_curious_terminating(a: f64, b: f64, c: f64, n: usize, q: Base) -> CheckResult {
    settle((|| {
        let (lhs, terms) = curious_terminating_terms(&a, &b, &c, n, &q.get())?;
        if terms.iter().any(|t| !t.is_finite()) {
            return Err(Error::ZeroDenominator { context: "terminating sum term", index: n as i64 });
        }
        let sum: NeumaierSum = terms.into_iter().sum();
        crate::sum::record_condition(sum.condition());
        Ok(CheckResult::compare(lhs, sum.value(), n + 1, TERMINATING_TOL))
    })())
}

/// Exact check of the terminating curious sum.
pub fn check_curious_terminating_exact(
    a: &BigRational,
    b: &BigRational,
    c: &BigRational,
    n: usize,
    q: &BigRational,
) -> CheckResult {
    settle(
        curious_terminating_sides(a, b, c, n, q)
            .map(|(l, r)| CheckResult::exact(to_f64(&l), to_f64(&r), l == r, n + 1)),
    )
}

/// At `a = 0` the terminating curious sum is the `10phi9` with parameters
/// `(-b, -b/c)` times `(-bcq;q)_n / (-bq;q)_n`.
pub fn check_curious_terminating_a0(b: &BigRational, c: &BigRational, n: usize, q: &BigRational) -> CheckResult {
    settle((|| {
        let zero = BigRational::zero();
        let (_, sum) = curious_terminating_sides(&zero, b, c, n, q)?;
        let ni = n as i64;
        let (vwp, _) = ten_phi_nine_sides(&(-b.clone()), &(-(b / c)), n, q)?;
        let factor = poch(&(-(b * c * q)), q, ni) / nz(poch(&(-(b * q)), q, ni), "(-bq;q)_n", ni)?;
        let other = vwp * factor;
        Ok(CheckResult::exact(to_f64(&sum), to_f64(&other), sum == other, n + 1))
    })())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inversion::rational as r;
    use num_traits::One;

    #[test]
    fn ten_phi_nine_examples() {
        let (l, rr) = ten_phi_nine_sides(&r(1, 3), &r(1, 5), 0, &r(1, 2)).unwrap();
        assert_eq!((l.clone(), rr.clone()), (BigRational::one(), BigRational::one()));
        let res = check_10phi9_exact(&r(1, 4), &r(1, 9), 1, &r(1, 2));
        assert!(res.passed(), "{res:?}");
        let (a, b, q) = (r(1, 3), r(1, 5), r(1, 2));
        let (l, _) = ten_phi_nine_sides(&a, &b, 1, &q).unwrap();
        let one = BigRational::one();
        let expected =
            (&one - &a * &q) * (&one - &a * &a * &q / (&b * &b)) / ((&one - &a * &q / &b) * (&one - &a * &a * &q / &b));
        assert_eq!(l, expected);
        for n in 0..=6 {
            assert!(check_10phi9_exact(&r(1, 4), &r(1, 9), n, &r(1, 2)).passed());
        }
        let res = check_10phi9(0.3, 0.12, 4, Base::new(0.5).unwrap(), 1e-11);
        assert!(res.passed(), "{res:?}");
    }

    #[test]
    fn literal_exact_route_with_square_base() {
        // q = 1/4 makes every square root rational for a = 1/9, b = 4/25.
        let res = check_10phi9_exact(&r(1, 9), &r(4, 25), 3, &r(1, 4));
        assert!(res.passed(), "{res:?}");
        assert_eq!(res.terms_used, 8);
    }

    #[test]
    fn curious_terminating_examples() {
        for n in 0..=6 {
            let res = check_curious_terminating_exact(&r(7, 3), &r(5, 1), &r(3, 10), n, &r(1, 2));
            assert!(res.passed(), "n={n}: {res:?}");
            assert!(check_curious_terminating_a0(&r(5, 1), &r(3, 10), n, &r(1, 2)).passed());
        }
        let res = check_curious_terminating(7.0 / 3.0, 5.0, 0.3, 3, Base::new(0.5).unwrap());
        assert!(res.passed(), "{res:?}");
        // a = 2 puts a - q^-1 = 0 at k = 1.
        let res = check_curious_terminating_exact(&r(2, 1), &r(5, 1), &r(3, 10), 3, &r(1, 2));
        assert_eq!(res.status, crate::check::Status::SkippedPole);
    }
}
