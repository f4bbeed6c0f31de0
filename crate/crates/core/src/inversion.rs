//! Krattenthaler's explicit inverse pair of infinite lower-triangular
//! matrices, the `a_j = a + q^j`, `c_j = a + b q^j`, `d = c` specialization,
//! delta-orthogonality and the rotated inverse relations.
//!
//! Entries are generic over [`Scalar`] so the same code runs in exact
//! rational arithmetic and in floating point.

use std::fmt::Debug;
use std::ops::Neg;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Num;

use crate::check::CheckResult;
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::qcore::TruncationPolicy;
use crate::sum::NeumaierSum;

/// Field elements the entries can be computed in.
pub trait Scalar: Num + Clone + Neg<Output = Self> + Debug + Send + Sync + 'static {}

impl Scalar for f64 {}
impl Scalar for BigRational {}

/// An index-to-value sequence such as `(a_j)` or `(c_j)`.
pub type Seq<T> = Arc<dyn Fn(i64) -> T + Send + Sync>;

pub fn seq<T, F: Fn(i64) -> T + Send + Sync + 'static>(f: F) -> Seq<T> {
    Arc::new(f)
}

/// A pair of mutually inverse lower-triangular matrices.
#[derive(Clone)]
pub enum MatrixPair<T> {
    /// `f_nk`, `g_kl` built from arbitrary `(a_j)`, `(c_j)` and `d`.
    General { a: Seq<T>, c: Seq<T>, d: T },
    /// The q-Pochhammer form with scalars `a, b, c` and base `q`.
    Special { a: T, b: T, c: T, q: T },
    /// `f = g = I`.
    Identity,
}

impl<T: Debug> Debug for MatrixPair<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MatrixPair::General { d, .. } => f.debug_struct("General").field("d", d).finish_non_exhaustive(),
            MatrixPair::Special { a, b, c, q } => {
                f.debug_struct("Special").field("a", a).field("b", b).field("c", c).field("q", q).finish()
            }
            MatrixPair::Identity => f.write_str("Identity"),
        }
    }
}

fn nonzero<T: Scalar>(x: T, context: &'static str, index: i64) -> Result<T> {
    if x.is_zero() {
        Err(Error::ZeroDenominator { context, index })
    } else {
        Ok(x)
    }
}

pub(crate) fn powi<T: Scalar>(q: &T, e: i64) -> Result<T> {
    let mut r = T::one();
    for _ in 0..e.unsigned_abs() {
        r = r * q.clone();
    }
    if e < 0 {
        Ok(T::one() / nonzero(r, "negative power of q", e)?)
    } else {
        Ok(r)
    }
}

/// `(x;q)_n` for `n >= 0`.
pub(crate) fn poch<T: Scalar>(x: &T, q: &T, n: i64) -> T {
    let mut p = T::one();
    let mut y = x.clone();
    for _ in 0..n {
        p = p * (T::one() - y.clone());
        y = y * q.clone();
    }
    p
}

impl<T: Scalar> MatrixPair<T> {
    /// General-kind pair with `a_j = a + q^j`, `c_j = a + b q^j`, `d = c`.
    pub fn general_from_special(a: T, b: T, c: T, q: T) -> Self {
        let (a1, q1) = (a.clone(), q.clone());
        let (a2, b2, q2) = (a, b, q);
        MatrixPair::General {
            a: seq(move |j| a1.clone() + powi(&q1, j).expect("q is nonzero")),
            c: seq(move |j| a2.clone() + b2.clone() * powi(&q2, j).expect("q is nonzero")),
            d: c,
        }
    }

    /// Entry `f_nk`; zero above the diagonal.
    pub fn f_entry(&self, n: i64, k: i64) -> Result<T> {
        if n < k {
            return Ok(T::zero());
        }
        match self {
            MatrixPair::Identity => Ok(if n == k { T::one() } else { T::zero() }),
            MatrixPair::General { a, c, d } => {
                let ck = c(k);
                let dk = d.clone() / nonzero(ck.clone(), "c_k", k)?;
                let mut num = T::one();
                for j in k..n {
                    let aj = a(j);
                    num = num * (aj.clone() - dk.clone()) * (aj - ck.clone());
                }
                let mut den = T::one();
                for j in (k + 1)..=n {
                    let cj = c(j);
                    den = den * (cj.clone() - dk.clone()) * (cj - ck.clone());
                }
                Ok(num / nonzero(den, "f_nk denominator", n)?)
            }
            MatrixPair::Special { a, b, c, q } => {
                let qk = powi(q, k)?;
                let u = a.clone() + b.clone() * qk.clone();
                let x =
                    u / nonzero(c.clone() - a.clone() * (a.clone() + b.clone() * qk.clone()), "c - a(a + b q^k)", k)?;
                let inv_b = T::one() / nonzero(b.clone(), "b", k)?;
                let len = n - k;
                let num = poch(&inv_b, q, len) * poch(&(x.clone() * qk.clone()), q, len);
                let den = poch(q, q, len) * poch(&(x * b.clone() * qk * q.clone()), q, len);
                Ok(num / nonzero(den, "f_nk denominator", n)?)
            }
        }
    }

    /// Entry `g_kl`; zero above the diagonal.
    pub fn g_entry(&self, k: i64, l: i64) -> Result<T> {
        if k < l {
            return Ok(T::zero());
        }
        match self {
            MatrixPair::Identity => Ok(if k == l { T::one() } else { T::zero() }),
            MatrixPair::General { a, c, d } => {
                let ck = c(k);
                let dk = d.clone() / nonzero(ck.clone(), "c_k", k)?;
                let (al, cl, ak) = (a(l), c(l), a(k));
                let lead_num = (al.clone() * cl.clone() - d.clone()) * (al - cl);
                let lead_den = (ak.clone() * ck.clone() - d.clone()) * (ak - ck.clone());
                let mut num = lead_num;
                for j in (l + 1)..=k {
                    let aj = a(j);
                    num = num * (aj.clone() - dk.clone()) * (aj - ck.clone());
                }
                let mut den = lead_den;
                for j in l..k {
                    let cj = c(j);
                    den = den * (cj.clone() - dk.clone()) * (cj - ck.clone());
                }
                Ok(num / nonzero(den, "g_kl denominator", k)?)
            }
            MatrixPair::Special { a, b, c, q } => {
                let (qk, ql) = (powi(q, k)?, powi(q, l)?);
                let len = k - l;
                let uk = a.clone() + b.clone() * qk.clone();
                let x = uk.clone() / nonzero(c.clone() - a.clone() * uk.clone(), "c - a(a + b q^k)", k)?;
                let ratio_num = c.clone() - (a.clone() + b.clone() * ql.clone()) * (a.clone() + ql.clone());
                let ratio_den = c.clone() - uk * (a.clone() + qk);
                let inv_b = T::one() / nonzero(b.clone(), "b", k)?;
                // (-1)^N q^(N choose 2) (q^(1-N)/b; q)_N = (-1)^N prod_{i<N} (q^i - 1/b)
                let mut signed = T::one();
                let mut qi = T::one();
                for _ in 0..len {
                    signed = signed * (inv_b.clone() - qi.clone());
                    qi = qi * q.clone();
                }
                let num = ratio_num * signed * poch(&(x.clone() * ql.clone() * q.clone()), q, len);
                let den = ratio_den * poch(q, q, len) * poch(&(x * b.clone() * ql), q, len);
                Ok(num / nonzero(den, "g_kl denominator", k)?)
            }
        }
    }

    /// `sum_{l <= k <= n} f_nk g_kl`, which is `delta_nl` for an inverse pair.
    pub fn delta_check(&self, n: i64, l: i64) -> Result<T> {
        let mut s = T::zero();
        for k in l..=n {
            s = s + self.f_entry(n, k)? * self.g_entry(k, l)?;
        }
        Ok(s)
    }

    /// `sum_{l <= k <= n} g_nk f_kl`, the product in the other order.
    pub fn delta_check_reversed(&self, n: i64, l: i64) -> Result<T> {
        let mut s = T::zero();
        for k in l..=n {
            s = s + self.g_entry(n, k)? * self.f_entry(k, l)?;
        }
        Ok(s)
    }
}

/// One `(n, l)` cell of a window check.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaCell<T> {
    pub n: i64,
    pub l: i64,
    pub fg: T,
    pub gf: T,
}

impl<T: Scalar> DeltaCell<T> {
    pub fn is_delta(&self) -> bool {
        let expected = if self.n == self.l { T::one() } else { T::zero() };
        self.fg == expected && self.gf == expected
    }
}

/// Both orthogonality sums for every `0 <= l <= n <= max_index`.
///
/// Entries are built once and shared by all cells; each cell equals
/// `delta_check(n, l)` and `delta_check_reversed(n, l)`.
pub fn delta_window<T: Scalar>(pair: &MatrixPair<T>, max_index: i64, exec: Execution) -> Result<Vec<DeltaCell<T>>> {
    let cells: Vec<(i64, i64)> = (0..=max_index).flat_map(|n| (0..=n).map(move |l| (n, l))).collect();
    let entries: Vec<(T, T)> = par::map(&cells, exec, |&(n, k)| Ok((pair.f_entry(n, k)?, pair.g_entry(n, k)?)))
        .into_iter()
        .collect::<Result<_>>()?;
    let at = |n: i64, k: i64| &entries[(n * (n + 1) / 2 + k) as usize];
    Ok(par::map(&cells, exec, |&(n, l)| {
        let (mut fg, mut gf) = (T::zero(), T::zero());
        for k in l..=n {
            fg = fg + at(n, k).0.clone() * at(k, l).1.clone();
            gf = gf + at(n, k).1.clone() * at(k, l).0.clone();
        }
        DeltaCell { n, l, fg, gf }
    }))
}

/// Which sum of the rotated inverse relations is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `sum_{n >= k} f_nk a_n`, compared with `b_k`.
    FToG,
    /// `sum_{k >= l} g_kl b_k`, compared with `a_l`.
    GToF,
}

/// Sequences `(a_n)`, `(b_k)` related through a matrix pair.
#[derive(Clone)]
pub struct InverseRelationCase {
    pub pair: MatrixPair<f64>,
    pub a_seq: Seq<f64>,
    pub b_seq: Seq<f64>,
    pub direction: Direction,
    pub policy: TruncationPolicy,
}

/// Evaluates the selected infinite sum at `target_index` and compares it with
/// the predicted sequence value.
pub fn apply_inverse_relation(case: &InverseRelationCase, target_index: i64, tolerance: f64) -> Result<CheckResult> {
    let policy = &case.policy;
    let mut acc = NeumaierSum::new();
    let mut small = 0usize;
    for step in 0..policy.max_terms {
        let i = target_index + step as i64;
        let term = match case.direction {
            Direction::FToG => case.pair.f_entry(i, target_index)? * (case.a_seq)(i),
            Direction::GToF => case.pair.g_entry(i, target_index)? * (case.b_seq)(i),
        };
        if !term.is_finite() {
            return Err(Error::ZeroDenominator { context: "inverse relation term", index: i });
        }
        acc.add(term);
        if term.abs() < policy.abs_floor.max(policy.rel_floor * acc.value().abs()) {
            small += 1;
            if small >= policy.consecutive_small {
                crate::sum::record_condition(acc.condition());
                let predicted = match case.direction {
                    Direction::FToG => (case.b_seq)(target_index),
                    Direction::GToF => (case.a_seq)(target_index),
                };
                return Ok(CheckResult::compare(acc.value(), predicted, step + 1, tolerance));
            }
        } else {
            small = 0;
        }
    }
    Err(Error::Truncation { partial: acc.value(), terms: policy.max_terms })
}

/// Exact rational helper.
pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// `true` when every orthogonality sum on the window is exactly `delta_nl`.
pub fn window_is_exact<T: Scalar>(cells: &[DeltaCell<T>]) -> bool {
    cells.iter().all(DeltaCell::is_delta)
}

impl<T: Scalar> MatrixPair<T> {
    /// Screens the window for vanishing entry denominators.
    pub fn screen_window(&self, max_index: i64) -> Result<()> {
        for n in 0..=max_index {
            for k in 0..=n {
                self.f_entry(n, k)?;
                self.g_entry(n, k)?;
            }
        }
        Ok(())
    }
}
