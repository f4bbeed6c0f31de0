//! The registry of verifiable cases, their samplers, and suite reports.

use std::collections::BTreeMap;
use std::time::Instant;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::check::{CheckResult, Status};
use crate::classical::{gauss_summation_check, legendre_duplication_check, pfaff_transform_check};
use crate::error::{Error, Result};
use crate::identities::{self as id, CuriousParams, LEMMA_TOL, TERMINATING_TOL};
use crate::inversion::{delta_window, seq, window_is_exact, Direction, MatrixPair};
use crate::par::{self, Execution};
use crate::qcore::{Base, TruncationPolicy};
use crate::qintegral::{
    check_q_beta, check_q_curious_beta, check_q_curious_beta_m, q_large_parameter_trend, q_limit_probe, LargeParameter,
    QBetaParams, QLimitCase, Q_LIMIT_SCHEDULE,
};
use crate::quadrature::{
    check_erdelyi, check_erdelyi_to_c0, check_family, halfline_transform_check, large_parameter_trend,
    BetaFamilyParams, BetaSelector, ErdelyiParams,
};
use crate::sample::{decimal_rational, Sampler};
use crate::sum::take_worst_condition;

/// Largest order of the terminating sums.
pub const MAX_ORDER: usize = 6;
/// Largest index of the exact delta-orthogonality window.
pub const DELTA_WINDOW: i64 = 12;
/// Redraws allowed when a draw lands on a pole or outside the domain.
pub const MAX_ATTEMPTS: usize = 32;
/// Draws whose floating sums amplify summand rounding by more than this are
/// redrawn: with summands accurate to about 1e-14 the result could not be
/// trusted to the 1e-9 the lemma checks ask for.
pub const CONDITION_LIMIT: f64 = 1e5;
/// The beta values cycled through by the classical integrals.
pub const BETA_GRID: [f64; 7] = [0.5, 0.9, 1.2, 2.5, 1.0, 1.7, 3.3];

/// Which part of the library a case exercises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Group {
    Inversion,
    Lemma,
    Expansion,
    Terminating,
    QIntegral,
    Classical,
    QLimit,
    Halfline,
}

/// A parameter assignment in insertion order, serialized as a JSON object of strings.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Params(pub Vec<(String, String)>);

impl Params {
    pub fn num(mut self, name: &str, x: f64) -> Self {
        self.0.push((name.into(), fmt_num(x)));
        self
    }

    pub fn int(mut self, name: &str, n: i64) -> Self {
        self.0.push((name.into(), n.to_string()));
        self
    }

    pub fn rat(mut self, name: &str, x: &BigRational) -> Self {
        self.0.push((name.into(), x.to_string()));
        self
    }

    pub fn text(mut self, name: &str, s: &str) -> Self {
        self.0.push((name.into(), s.into()));
        self
    }
}

impl Serialize for Params {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

type Runner = fn(&mut Sampler, Base, &TruncationPolicy) -> (Params, CheckResult);

/// One registry entry.
pub struct Entry {
    pub id: &'static str,
    pub group: Group,
    pub description: &'static str,
    /// Whether the case is evaluated once per configured `q`.
    pub uses_q: bool,
    run: Runner,
}

/// One evaluated draw.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub params: Params,
    pub result: CheckResult,
    /// Largest `sum |t_k| / |sum t_k|` over the floating sums of the draw.
    pub condition: f64,
    /// Draws rejected before this one.
    pub redraws: usize,
}

impl Evaluation {
    fn admissible(&self) -> bool {
        self.result.status != Status::SkippedPole && self.condition <= CONDITION_LIMIT
    }
}

impl Entry {
    fn draw(&self, s: &mut Sampler, q: Base, policy: &TruncationPolicy, redraws: usize) -> Evaluation {
        let _ = take_worst_condition();
        let (params, result) = (self.run)(s, q, policy);
        Evaluation { params, result, condition: take_worst_condition(), redraws }
    }

    /// Draws parameters and evaluates one sample. Draws landing on a pole or
    /// on an ill-conditioned sum are replaced by the next draw of the same
    /// stream, at most `MAX_ATTEMPTS` times.
    pub fn evaluate(&self, q: Base, index: usize, seed: u64, policy: &TruncationPolicy) -> Evaluation {
        let qkey = if self.uses_q { q.get() } else { 0.0 };
        let mut s = Sampler::new(self.id, qkey, index, seed);
        let mut last = self.draw(&mut s, q, policy, 0);
        for attempt in 1..MAX_ATTEMPTS {
            if last.admissible() {
                break;
            }
            last = self.draw(&mut s, q, policy, attempt);
        }
        if self.uses_q {
            last.params.0.insert(0, ("q".into(), fmt_num(q.get())));
        }
        last
    }
}

// ---- samplers shared by several entries ----

fn curious_params(s: &mut Sampler, q: Base) -> CuriousParams {
    CuriousParams::new(s.uniform(-0.5, 0.8), s.signed(0.1, 0.9), s.signed(4.0, 12.0), q)
}

fn curious_fields(p: &CuriousParams) -> Params {
    Params::default().num("a", p.a).num("b", p.b).num("c", p.c)
}

fn direction(s: &Sampler) -> (Direction, &'static str) {
    if s.index().is_multiple_of(2) {
        (Direction::FToG, "f-to-g")
    } else {
        (Direction::GToF, "g-to-f")
    }
}

/// `a` and `c` with every weight factor positive and the inner argument below 0.63.
fn curious_ac(s: &mut Sampler) -> (f64, f64) {
    let a = s.uniform(-0.4, 1.5);
    (a, (a + 1.0) * (a + 1.0) + s.uniform(1.5, 25.0))
}

/// `m` in `0..=3` and a beta from the grid shifted above `m - 1`.
fn beta_m(s: &mut Sampler) -> (f64, usize) {
    let m = s.int(0, 3) as usize;
    let beta = s.cycle(&BETA_GRID);
    (if m >= 1 && beta <= m as f64 - 1.0 { beta + m as f64 - 1.0 } else { beta }, m)
}

/// Admissible parameters of the given beta-family member.
pub fn sample_family(selector: BetaSelector, s: &mut Sampler) -> BetaFamilyParams {
    let beta = s.cycle(&BETA_GRID);
    match selector {
        BetaSelector::Euler => BetaFamilyParams::euler(s.uniform(0.2, 4.0), beta),
        BetaSelector::Curious => {
            let (a, c) = curious_ac(s);
            BetaFamilyParams::curious(s.uniform(0.3, 4.0), beta, a, c)
        }
        BetaSelector::CuriousSucc => {
            let (a, c) = curious_ac(s);
            BetaFamilyParams::curious_succ(beta, a, c)
        }
        BetaSelector::CuriousDiag => {
            let (a, c) = curious_ac(s);
            BetaFamilyParams::curious_diag(beta, a, c)
        }
        BetaSelector::CuriousC0 => BetaFamilyParams::curious_c0(s.uniform(0.3, 4.0), beta, s.uniform(1.1, 6.0)),
        BetaSelector::CuriousA0 => BetaFamilyParams::curious_a0(s.uniform(0.3, 4.0), beta, s.uniform(1.1, 20.0)),
        BetaSelector::CuriousM => {
            let (beta, m) = beta_m(s);
            let (a, c) = curious_ac(s);
            BetaFamilyParams::curious_m(beta, a, c, s.uniform(-1.0, 0.7), m)
        }
        BetaSelector::CuriousMLimit => {
            let (beta, m) = beta_m(s);
            BetaFamilyParams::curious_m_limit(beta, m, s.uniform(-1.0, 0.7))
        }
    }
}

fn family_fields(p: &BetaFamilyParams) -> Params {
    let base = Params::default().text("selector", selector_name(p.selector));
    let base = match p.selector {
        BetaSelector::Euler | BetaSelector::Curious | BetaSelector::CuriousC0 | BetaSelector::CuriousA0 => {
            base.num("alpha", p.alpha)
        }
        _ => base,
    };
    let base = base.num("beta", p.beta);
    match p.selector {
        BetaSelector::Euler => base,
        BetaSelector::Curious | BetaSelector::CuriousSucc | BetaSelector::CuriousDiag => {
            base.num("a", p.a).num("c", p.c)
        }
        BetaSelector::CuriousC0 => base.num("a", p.a),
        BetaSelector::CuriousA0 => base.num("c", p.c),
        BetaSelector::CuriousM => base.num("a", p.a).num("c", p.c).num("e", p.e).int("m", p.m as i64),
        BetaSelector::CuriousMLimit => base.num("e", p.e).int("m", p.m as i64),
    }
}

pub fn selector_name(s: BetaSelector) -> &'static str {
    match s {
        BetaSelector::Euler => "euler",
        BetaSelector::Curious => "curious",
        BetaSelector::CuriousSucc => "curious-succ",
        BetaSelector::CuriousDiag => "curious-diag",
        BetaSelector::CuriousC0 => "curious-c0",
        BetaSelector::CuriousA0 => "curious-a0",
        BetaSelector::CuriousM => "curious-m",
        BetaSelector::CuriousMLimit => "curious-m-limit",
    }
}

pub fn parse_selector(name: &str) -> Option<BetaSelector> {
    BetaSelector::ALL.into_iter().find(|&s| selector_name(s) == name)
}

fn family_case(selector: BetaSelector, s: &mut Sampler) -> (Params, CheckResult) {
    let p = sample_family(selector, s);
    (family_fields(&p), check_family(&p))
}

fn q_curious(s: &mut Sampler, q: Base) -> QBetaParams {
    let (a, c) = curious_ac(s);
    QBetaParams::curious(s.uniform(0.3, 4.0), s.uniform(0.3, 4.0), a, c, q)
}

fn q_fields(p: &QBetaParams, with_m: bool) -> Params {
    let base = Params::default();
    let base = if with_m { base } else { base.num("alpha", p.alpha) };
    let base = base.num("beta", p.beta).num("a", p.a).num("c", p.c);
    if with_m {
        base.num("e", p.e).int("m", p.m as i64)
    } else {
        base
    }
}

fn as_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn square(x: BigRational) -> BigRational {
    &x * &x
}

fn exact_delta(pair: &MatrixPair<BigRational>) -> CheckResult {
    let run = || -> Result<CheckResult> {
        let cells = delta_window(pair, DELTA_WINDOW, Execution::Sequential)?;
        let good = cells.iter().filter(|c| c.is_delta()).count();
        Ok(CheckResult::exact(good as f64, cells.len() as f64, window_is_exact(&cells), cells.len()))
    };
    crate::check::settle(run())
}

/// Runs an exact terminating check for every order `n <= MAX_ORDER` on one
/// parameter set. A failure at any order beats a pole at another.
fn every_order(check: impl Fn(usize) -> CheckResult) -> CheckResult {
    let results: Vec<CheckResult> = (0..=MAX_ORDER).map(check).collect();
    let terms = results.iter().map(|r| r.terms_used).sum();
    let worst = results.iter().position(|r| r.status.is_failure()).or_else(|| results.iter().position(|r| !r.passed()));
    match worst {
        Some(n) => {
            let r = results[n].clone();
            let note = format!("n = {n}: {}", r.diagnostic.clone().unwrap_or_default());
            r.with_diagnostic(note)
        }
        None => CheckResult { terms_used: terms, ..results[MAX_ORDER].clone() },
    }
}

/// Folds the per-`q` probe results into one: it passes only if every `q`
/// passed and the deviations decreased.
fn fold_probe(results: Vec<CheckResult>) -> CheckResult {
    let devs: Vec<String> = results.iter().map(|r| format!("{:.3e}", r.abs_err)).collect();
    let worst = results.iter().find(|r| !r.passed()).cloned();
    let mut out = worst.unwrap_or_else(|| results.last().cloned().expect("nonempty schedule"));
    let note = format!("deviations over q = 0.9, 0.99, 0.999: [{}]", devs.join(", "));
    out.diagnostic = Some(match out.diagnostic {
        Some(d) if !out.passed() => format!("{d}; {note}"),
        _ => note,
    });
    out
}

const Q_BETA_PROBES: [(f64, f64); 5] = [(2.0, 3.0), (1.5, 2.5), (2.5, 1.7), (3.0, 1.2), (1.2, 2.0)];
const CURIOUS_PROBES: [(f64, f64, f64, f64); 5] =
    [(2.2, 1.4, 0.6, 11.0), (1.8, 1.1, 0.7, 9.0), (2.5, 2.0, 0.3, 10.0), (1.5, 1.5, 0.2, 6.0), (3.0, 1.2, 0.5, 15.0)];

fn probe_schedule() -> Vec<Base> {
    Q_LIMIT_SCHEDULE.iter().map(|&x| Base::new(x).expect("schedule lies in (0, 1)")).collect()
}

macro_rules! entry {
    ($id:literal, $group:ident, $uses_q:expr, $desc:literal, $run:expr) => {
        Entry { id: $id, group: Group::$group, description: $desc, uses_q: $uses_q, run: $run }
    };
}

/// Every verifiable case, in report order.
pub static REGISTRY: &[Entry] = &[
    // ---- inverse pairs ----
    entry!(
        "inverse_pair_general",
        Inversion,
        false,
        "f_nk, g_kl from arbitrary sequences a_j, c_j and d are mutually inverse (exact, 0 <= l <= n <= 12)",
        |s, _, _| {
            let coeffs: Vec<BigRational> = (0..6).map(|_| s.rational((-9, 9), 5)).collect();
            let d = s.nonzero_rational((-9, 9), 5);
            let params = coeffs
                .iter()
                .enumerate()
                .fold(Params::default(), |p, (i, c)| p.rat(["a0", "a1", "a2", "c0", "c1", "c2"][i], c))
                .rat("d", &d);
            let (a, c) = (coeffs[..3].to_vec(), coeffs[3..].to_vec());
            let quad = |k: &[BigRational], j: i64| {
                let j = BigRational::from_integer(j.into());
                &k[0] + &k[1] * &j + &k[2] * &j * &j
            };
            let pair = MatrixPair::General { a: seq(move |j| quad(&a, j)), c: seq(move |j| quad(&c, j)), d };
            (params, exact_delta(&pair))
        }
    ),
    entry!(
        "inverse_pair_special",
        Inversion,
        true,
        "the q-Pochhammer inverse pair in a, b, c and q is mutually inverse (exact, 0 <= l <= n <= 12)",
        |s, q, _| {
            let qr = decimal_rational(q.get());
            let (a, b, c) = (s.rational((-9, 9), 6), s.nonzero_rational((-9, 9), 6), s.nonzero_rational((-20, 20), 3));
            let params = Params::default().rat("a", &a).rat("b", &b).rat("c", &c);
            (params, exact_delta(&MatrixPair::Special { a, b, c, q: qr }))
        }
    ),
    entry!(
        "inverse_relation_base_q2",
        Inversion,
        true,
        "q-Kummer in rotated form and its inverse relation, summed in floating point",
        |s, q, pol| {
            let p = curious_params(s, q);
            let l = s.int(0, 3);
            let (dir, name) = direction(s);
            (curious_fields(&p).int("l", l).text("direction", name), id::check_base_q2_derivation(&p, l, dir, pol))
        }
    ),
    entry!(
        "inverse_relation_phi21",
        Inversion,
        true,
        "Heine's transformation in rotated form and its inverse relation",
        |s, q, pol| {
            let p = curious_params(s, q);
            let z = p.b * s.uniform(-0.9, 0.9);
            let l = s.int(0, 3);
            let (dir, name) = direction(s);
            (
                curious_fields(&p).num("z", z).int("l", l).text("direction", name),
                id::check_phi21_derivation(&p, z, l, dir, pol),
            )
        }
    ),
    entry!(
        "inverse_relation_phi32",
        Inversion,
        true,
        "the (m+1)-term 3phi2 sum in rotated form and its inverse relation",
        |s, q, pol| {
            let m = s.int(0, 3) as usize;
            let mut p = curious_params(s, q);
            p.b = s.signed(0.05, 0.9) * q.powi(m as i64 - 1).sqrt().min(1.0);
            let e = s.uniform(-1.0, 0.7);
            let l = s.int(0, 3);
            let (dir, name) = direction(s);
            let params = curious_fields(&p).num("e", e).int("m", m as i64).int("l", l).text("direction", name);
            (params, id::check_phi32_derivation(&p, e, m, l, dir, pol))
        }
    ),
    // ---- summation lemmas ----
    entry!("q_gauss", Lemma, true, "q-Gauss: 2phi1(a, b; c; q, c/ab) = (c/a, c/b)_inf / (c, c/ab)_inf", |s, q, pol| {
        let (a, b) = (s.signed(1.2, 3.0), s.signed(1.2, 3.0));
        let c = s.uniform(-0.8, 0.8);
        (Params::default().num("a", a).num("b", b).num("c", c), id::check_q_gauss(a, b, c, q, pol))
    }),
    entry!(
        "q_kummer",
        Lemma,
        true,
        "q-Kummer: 2phi1(a, b; aq/b; q, -q/b) as products in bases q and q^2",
        |s, q, pol| {
            let (a, b) = (s.uniform(-0.9, 0.9), s.signed(1.1, 4.0));
            (Params::default().num("a", a).num("b", b), id::check_q_kummer(a, b, q, pol))
        }
    ),
    entry!("rogers_6phi5", Lemma, true, "Rogers' very-well-poised 6phi5 summation", |s, q, pol| {
        let a = s.uniform(0.05, 0.9);
        let (b, c, d) = (s.signed(1.1, 3.0), s.signed(1.1, 3.0), s.signed(1.1, 3.0));
        let params = Params::default().num("a", a).num("b", b).num("c", c).num("d", d);
        (params, id::check_rogers_6phi5(a, b, c, d, q, pol))
    }),
    entry!(
        "rogers_to_kummer",
        Lemma,
        true,
        "c = sqrt(a), d = -sqrt(a) in the 6phi5 gives q-Kummer on both sides",
        |s, q, pol| {
            let (a, b) = (s.uniform(0.05, 0.9), s.signed(1.1, 4.0));
            (Params::default().num("a", a).num("b", b), id::check_rogers_to_kummer(a, b, q, pol))
        }
    ),
    entry!("heine", Lemma, true, "second iterate of Heine's transformation of a 2phi1", |s, q, pol| {
        let b = s.signed(1.1, 2.0);
        let z = s.uniform(-0.9, 0.9) / b.abs();
        let (a, c) = (s.uniform(-2.0, 2.0), s.uniform(-0.9, 0.9));
        let params = Params::default().num("a", a).num("b", b).num("c", c).num("z", z);
        (params, id::check_heine(a, b, c, z, q, pol))
    }),
    entry!(
        "finite_3phi2",
        Lemma,
        true,
        "nonterminating 3phi2(a, b, dq^m; c, d; q, cq^-m/ab) as q-Gauss times an (m+1)-term sum, m = 0..3",
        |s, q, pol| {
            let m = s.cycle(&[0usize, 1, 2, 3]);
            let (a, b, c, d) = finite_3phi2_params(s, q, m);
            let params = Params::default().num("a", a).num("b", b).num("c", c).num("d", d).int("m", m as i64);
            (params, id::check_finite_3phi2(a, b, c, d, m, q, pol))
        }
    ),
    entry!("finite_3phi2_m0", Lemma, true, "the 3phi2 sum at m = 0 equals q-Gauss", |s, q, pol| {
        let (a, b, c, d) = finite_3phi2_params(s, q, 0);
        (
            Params::default().num("a", a).num("b", b).num("c", c).num("d", d),
            id::check_finite_3phi2_m0(a, b, c, d, q, pol),
        )
    }),
    entry!("finite_3phi2_m1", Lemma, true, "the 3phi2 sum at m = 1 has a two-term closed form", |s, q, pol| {
        let (a, b, c, d) = finite_3phi2_params(s, q, 1);
        (
            Params::default().num("a", a).num("b", b).num("c", c).num("d", d),
            id::check_finite_3phi2_m1(a, b, c, d, q, pol),
        )
    }),
    entry!(
        "gauss_summation",
        Lemma,
        false,
        "Gauss: 2F1(a, b; c; 1) = Gamma(c) Gamma(c-a-b) / (Gamma(c-a) Gamma(c-b))",
        |s, _, _| {
            let (a, b) = (s.uniform(-2.0, 2.0), s.uniform(-2.0, 2.0));
            let c = a + b + s.uniform(0.5, 3.0);
            (Params::default().num("a", a).num("b", b).num("c", c), gauss_summation_check(a, b, c, LEMMA_TOL))
        }
    ),
    entry!(
        "legendre_duplication",
        Lemma,
        false,
        "Legendre duplication and Gamma(b)^2 / (2 Gamma(2b)) = sqrt(pi) Gamma(b) / (4^b Gamma(b + 1/2))",
        |s, _, _| {
            let beta = s.uniform(0.1, 6.0);
            (Params::default().num("beta", beta), legendre_duplication_check(beta))
        }
    ),
    entry!("pfaff_transform", Lemma, false, "Pfaff's transformation of a terminating 2F1(-m, b; c; x)", |s, _, _| {
        let m = s.int(0, 4) as usize;
        let (b, c, x) = (s.uniform(-2.0, 2.0), s.uniform(0.5, 4.0), s.uniform(-2.0, 0.9));
        let params = Params::default().int("m", m as i64).num("b", b).num("c", c).num("x", x);
        (params, pfaff_transform_check(m, b, c, x))
    }),
    // ---- curious expansions ----
    entry!(
        "curious_expansion",
        Expansion,
        true,
        "(b^2 q)_inf / (bq)_inf expanded in u_k = a + b q^k with free parameter c",
        |s, q, pol| {
            let p = curious_params(s, q);
            (curious_fields(&p), id::check_curious_expansion(&p, pol))
        }
    ),
    entry!("curious_expansion_c0", Expansion, true, "the curious expansion at c = 0 is a q-Gauss sum", |s, q, pol| {
        let (a, b) = (s.uniform(1.0, 3.0), s.signed(0.1, 0.9));
        (Params::default().num("a", a).num("b", b), id::check_curious_expansion_c0(a, b, q, pol))
    }),
    entry!(
        "curious_expansion_a0",
        Expansion,
        true,
        "the curious expansion at a = 0 is a very-well-poised 8phi7 summation",
        |s, q, pol| {
            let (b, c) = (s.signed(0.1, 0.9), s.signed(4.0, 12.0));
            (Params::default().num("b", b).num("c", c), id::check_curious_expansion_a0(b, c, q, pol))
        }
    ),
    entry!(
        "curious_base_q2",
        Expansion,
        true,
        "(-bq)_inf / (-q)_inf expanded with mixed base q and q^2 products",
        |s, q, pol| {
            let p = curious_params(s, q);
            (curious_fields(&p), id::check_curious_base_q2(&p, pol))
        }
    ),
    entry!(
        "quadratic_expansion",
        Expansion,
        true,
        "the quadratic expansion and its split into two base-q^2 3phi2 series",
        |s, q, pol| {
            let (a, b) = (s.uniform(-0.9, 0.9), s.signed(0.1, 0.9));
            (Params::default().num("a", a).num("b", b), id::check_quadratic_expansion(a, b, q, pol))
        }
    ),
    entry!(
        "base_q2_to_quadratic",
        Expansion,
        true,
        "the base-q^2 expansion at c = 0, a -> -1/a reduces to the quadratic one",
        |s, q, pol| {
            let (a, b) = (s.signed(0.2, 0.9), s.signed(0.1, 0.9));
            (Params::default().num("a", a).num("b", b), id::check_base_q2_reduces_to_quadratic(a, b, q, pol))
        }
    ),
    entry!(
        "curious_phi21",
        Expansion,
        true,
        "(z)_inf / (z/b)_inf expanded with an inner 2phi1 per summand",
        |s, q, pol| {
            let p = curious_params(s, q);
            let z = p.b * s.uniform(-0.9, 0.9);
            (curious_fields(&p).num("z", z), id::check_curious_phi21(&p, z, pol))
        }
    ),
    entry!(
        "phi21_to_curious",
        Expansion,
        true,
        "the 2phi1 expansion at z = b^2 q is the curious expansion",
        |s, q, pol| {
            let p = curious_params(s, q);
            (curious_fields(&p), id::check_phi21_reduces_to_curious(&p, pol))
        }
    ),
    entry!(
        "phi21_to_base_q2",
        Expansion,
        true,
        "the 2phi1 expansion at z = -bq is the base-q^2 expansion",
        |s, q, pol| {
            let p = curious_params(s, q);
            (curious_fields(&p), id::check_phi21_reduces_to_base_q2(&p, pol))
        }
    ),
    entry!(
        "curious_phi32",
        Expansion,
        true,
        "(b^2 q)_inf / (bq)_inf expanded with an inner terminating 3phi2 in e and m, m = 0..3",
        |s, q, pol| {
            let m = s.cycle(&[0usize, 1, 2, 3]);
            let mut p = curious_params(s, q);
            p.b = s.signed(0.05, 0.9) * q.powi(m as i64 - 1).min(1.0);
            let e = s.uniform(-1.0, 0.7);
            (curious_fields(&p).num("e", e).int("m", m as i64), id::check_curious_phi32(&p, e, m, pol))
        }
    ),
    entry!(
        "phi32_m0",
        Expansion,
        true,
        "the 3phi2 expansion at m = 0 is the curious expansion for every e",
        |s, q, pol| {
            let p = curious_params(s, q);
            let e = s.uniform(-1.0, 0.7);
            (curious_fields(&p).num("e", e), id::check_phi32_m0(&p, e, pol))
        }
    ),
    entry!(
        "phi32_large_e",
        Expansion,
        true,
        "the 3phi2 expansion tends to the curious expansion as e grows (e = 1e4, 1e6, 1e8)",
        |s, q, pol| {
            let m = s.int(0, 3) as usize;
            let mut p = curious_params(s, q);
            p.b = s.signed(0.05, 0.9) * q.powi(m as i64 - 1).min(1.0);
            (curious_fields(&p).int("m", m as i64), id::check_phi32_large_e(&p, m, pol))
        }
    ),
    // ---- terminating identities ----
    entry!(
        "vwp_10phi9",
        Terminating,
        true,
        "terminating very-well-poised 10phi9 summation, floating point, n = 0..6",
        |s, q, _| {
            let n = s.cycle(&[0usize, 1, 2, 3, 4, 5, 6]);
            let (a, b) = (s.uniform(0.05, 3.0), s.uniform(0.05, 3.0));
            (
                Params::default().num("a", a).num("b", b).int("n", n as i64),
                id::check_10phi9(a, b, n, q, TERMINATING_TOL),
            )
        }
    ),
    entry!(
        "vwp_10phi9_exact",
        Terminating,
        true,
        "terminating very-well-poised 10phi9 summation in exact rational arithmetic, every n = 0..6",
        |s, q, _| {
            let a = square(s.nonzero_rational((-9, 9), 9));
            let b = square(s.nonzero_rational((-9, 9), 9));
            let qr = decimal_rational(q.get());
            (Params::default().rat("a", &a).rat("b", &b), every_order(|n| id::check_10phi9_exact(&a, &b, n, &qr)))
        }
    ),
    entry!(
        "curious_terminating",
        Terminating,
        true,
        "the terminating curious sum in a, b, c, floating point, n = 0..6",
        |s, q, _| {
            let n = s.cycle(&[0usize, 1, 2, 3, 4, 5, 6]);
            let (a, b, c) = terminating_params(s);
            let (af, bf, cf) = (as_f64(&a), as_f64(&b), as_f64(&c));
            let params = Params::default().num("a", af).num("b", bf).num("c", cf).int("n", n as i64);
            (params, id::check_curious_terminating(af, bf, cf, n, q))
        }
    ),
    entry!(
        "curious_terminating_exact",
        Terminating,
        true,
        "the terminating curious sum in exact rational arithmetic, every n = 0..6",
        |s, q, _| {
            let (a, b, c) = terminating_params(s);
            let qr = decimal_rational(q.get());
            let params = Params::default().rat("a", &a).rat("b", &b).rat("c", &c);
            (params, every_order(|n| id::check_curious_terminating_exact(&a, &b, &c, n, &qr)))
        }
    ),
    entry!(
        "curious_terminating_a0",
        Terminating,
        true,
        "the terminating curious sum at a = 0 is a 10phi9 times (-bcq)_n / (-bq)_n, exact, every n = 0..6",
        |s, q, _| {
            let (_, b, c) = terminating_params(s);
            let qr = decimal_rational(q.get());
            (
                Params::default().rat("b", &b).rat("c", &c),
                every_order(|n| id::check_curious_terminating_a0(&b, &c, n, &qr)),
            )
        }
    ),
    // ---- q-integrals ----
    entry!(
        "q_beta",
        QIntegral,
        true,
        "q-beta integral of (qt)_inf / (q^beta t)_inf t^(alpha-1) against Gamma_q",
        |s, q, pol| {
            let (alpha, beta) = (s.uniform(0.3, 4.0), s.uniform(0.3, 4.0));
            (Params::default().num("alpha", alpha).num("beta", beta), check_q_beta(alpha, beta, q, pol))
        }
    ),
    entry!(
        "q_curious_beta",
        QIntegral,
        true,
        "the generalized q-beta integral with an inner 2phi1 in alpha, beta, a, c",
        |s, q, pol| {
            let p = q_curious(s, q);
            (q_fields(&p, false), check_q_curious_beta(&p, pol))
        }
    ),
    entry!(
        "q_curious_beta_m",
        QIntegral,
        true,
        "the q-beta-type integral with an inner terminating 3phi2 in e and m, m = 0..3",
        |s, q, pol| {
            let (beta, m) = beta_m(s);
            let (a, c) = curious_ac(s);
            let p = QBetaParams::curious_m(beta, a, c, s.uniform(-1.0, 0.7), m, q);
            (q_fields(&p, true), check_q_curious_beta_m(&p, pol))
        }
    ),
    entry!(
        "q_curious_beta_limit",
        QIntegral,
        true,
        "the generalized q-beta integral tends to the q-beta integral as c or a grows",
        |s, q, pol| {
            let p = q_curious(s, q);
            let (which, name) = if s.index() % 2 == 0 { (LargeParameter::C, "c") } else { (LargeParameter::A, "a") };
            (q_fields(&p, false).text("large", name), q_large_parameter_trend(&p, which, pol))
        }
    ),
    // ---- classical integrals ----
    entry!("beta", Classical, false, "Euler's beta integral", |s, _, _| family_case(BetaSelector::Euler, s)),
    entry!(
        "curious_beta",
        Classical,
        false,
        "the curious beta integral with weight in a, c and an inner 2F1(alpha-beta-1, -beta; alpha)",
        |s, _, _| family_case(BetaSelector::Curious, s)
    ),
    entry!(
        "curious_beta_succ",
        Classical,
        false,
        "the alpha = beta + 1 case, equal to Gamma(beta)^2 / (2 Gamma(2 beta))",
        |s, _, _| family_case(BetaSelector::CuriousSucc, s)
    ),
    entry!(
        "curious_beta_diag",
        Classical,
        false,
        "the alpha = beta case with the factor c - a^2 + t^2, equal to Gamma(beta)^2 / Gamma(2 beta)",
        |s, _, _| family_case(BetaSelector::CuriousDiag, s)
    ),
    entry!(
        "curious_beta_c0",
        Classical,
        false,
        "the c -> 0 form with weight a^beta (a+1)^(beta+1) / (a+t)^(2 beta + 1)",
        |s, _, _| family_case(BetaSelector::CuriousC0, s)
    ),
    entry!(
        "curious_beta_a0",
        Classical,
        false,
        "the a = 0 form with weight (c-1) c^beta (c-t)^(beta-1) / (c-t^2)^(2 beta)",
        |s, _, _| family_case(BetaSelector::CuriousA0, s)
    ),
    entry!(
        "curious_beta_m",
        Classical,
        false,
        "the beta-type integral with a terminating 2F1(-beta, -m; -2 beta) in a, c, e",
        |s, _, _| family_case(BetaSelector::CuriousM, s)
    ),
    entry!(
        "curious_beta_m_limit",
        Classical,
        false,
        "the c -> inf form of the terminating beta-type integral, in e and m",
        |s, _, _| family_case(BetaSelector::CuriousMLimit, s)
    ),
    entry!(
        "erdelyi",
        Classical,
        false,
        "Erdelyi's fractional integral representation of 2F1(a, b; c; x)",
        |s, _, _| {
            let mu = s.uniform(0.3, 3.0);
            let p = ErdelyiParams {
                a: s.uniform(-1.5, 2.5),
                b: s.uniform(-1.5, 2.5),
                c: mu + s.uniform(0.3, 3.0),
                mu,
                lambda: s.uniform(0.2, 3.0),
                x: s.uniform(-0.9, 0.9),
            };
            let params = Params::default()
                .num("a", p.a)
                .num("b", p.b)
                .num("c", p.c)
                .num("mu", p.mu)
                .num("lambda", p.lambda)
                .num("x", p.x);
            (params, check_erdelyi(&p))
        }
    ),
    entry!(
        "erdelyi_to_c0",
        Classical,
        false,
        "Erdelyi's formula with lambda = mu = alpha, x = -1/a gives the c -> 0 form",
        |s, _, _| {
            let (alpha, beta, a) = (s.uniform(0.3, 4.0), s.cycle(&BETA_GRID), s.uniform(1.1, 6.0));
            (Params::default().num("alpha", alpha).num("beta", beta).num("a", a), check_erdelyi_to_c0(alpha, beta, a))
        }
    ),
    entry!(
        "classical_large_parameter",
        Classical,
        false,
        "integrands approach their limits as c or a grows (1e4, 1e6, 1e8), with matching integrals",
        |s, _, _| {
            let sel = s.cycle(&[
                BetaSelector::Curious,
                BetaSelector::CuriousC0,
                BetaSelector::CuriousA0,
                BetaSelector::CuriousM,
            ]);
            let p = sample_family(sel, s);
            (family_fields(&p), large_parameter_trend(&p))
        }
    ),
    // ---- q -> 1 ----
    entry!(
        "q_limit_q_beta",
        QLimit,
        false,
        "|q-beta integral - beta integral| decreases over q = 0.9, 0.99, 0.999 (five fixed cases)",
        |s, _, pol| {
            let (alpha, beta) = s.cycle(&Q_BETA_PROBES);
            let case = QLimitCase::QBeta { alpha, beta };
            (
                Params::default().num("alpha", alpha).num("beta", beta),
                fold_probe(q_limit_probe(&case, &probe_schedule(), pol)),
            )
        }
    ),
    entry!(
        "q_limit_curious_beta",
        QLimit,
        false,
        "|generalized q-beta integral - curious beta integral| decreases over q = 0.9, 0.99, 0.999 (five fixed cases)",
        |s, _, pol| {
            let (alpha, beta, a, c) = s.cycle(&CURIOUS_PROBES);
            let case = QLimitCase::Curious { alpha, beta, a, c };
            let params = Params::default().num("alpha", alpha).num("beta", beta).num("a", a).num("c", c);
            (params, fold_probe(q_limit_probe(&case, &probe_schedule(), pol)))
        }
    ),
    // ---- half line ----
    entry!(
        "halfline",
        Halfline,
        false,
        "a beta-family integral re-evaluated over [0, inf) after t = s/(s+1)",
        |s, _, _| {
            let sel = s.cycle(&BetaSelector::ALL);
            let p = sample_family(sel, s);
            (family_fields(&p), halfline_transform_check(&p))
        }
    ),
];

fn finite_3phi2_params(s: &mut Sampler, q: Base, m: usize) -> (f64, f64, f64, f64) {
    let (a, b) = (s.signed(1.2, 3.0), s.signed(1.2, 3.0));
    let cap = (0.85 * q.powi(m as i64) * (a * b).abs()).min(0.9);
    let c = s.signed(0.05, 1.0) * cap;
    (a, b, c, s.uniform(-0.9, 0.9))
}

fn terminating_params(s: &mut Sampler) -> (BigRational, BigRational, BigRational) {
    (s.rational((-9, 9), 7), s.nonzero_rational((-9, 9), 7), s.nonzero_rational((-9, 9), 7))
}

pub fn lookup(id: &str) -> Option<&'static Entry> {
    REGISTRY.iter().find(|e| e.id == id)
}

/// Output format of a report file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

/// What to run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    /// Registry ids, or `"all"`.
    pub suites: Vec<String>,
    pub q_values: Vec<Base>,
    pub seed: u64,
    pub samples_per_identity: usize,
    pub tol_overrides: BTreeMap<String, f64>,
    pub report_path: Option<String>,
    pub report_format: ReportFormat,
    pub execution: Execution,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            suites: vec!["all".into()],
            q_values: [0.3, 0.5, 0.8].iter().map(|&x| Base::new(x).expect("in (0, 1)")).collect(),
            seed: 42,
            samples_per_identity: 5,
            tol_overrides: BTreeMap::new(),
            report_path: None,
            report_format: ReportFormat::Json,
            execution: Execution::Parallel,
        }
    }
}

impl SuiteConfig {
    /// The selected entries in registry order.
    pub fn entries(&self) -> Result<Vec<&'static Entry>> {
        if self.suites.is_empty() {
            return Err(Error::Domain("empty suite selection".into()));
        }
        if self.samples_per_identity == 0 {
            return Err(Error::Domain("samples per identity must be at least 1".into()));
        }
        if self.q_values.is_empty() {
            return Err(Error::Domain("at least one q value is required".into()));
        }
        for (id, tol) in &self.tol_overrides {
            if lookup(id).is_none() {
                return Err(Error::Domain(format!("tolerance override for unknown id {id}")));
            }
            if !(*tol > 0.0) {
                return Err(Error::Domain(format!("tolerance for {id} must be positive")));
            }
        }
        if self.suites.iter().any(|s| s == "all") {
            return Ok(REGISTRY.iter().collect());
        }
        for s in &self.suites {
            if lookup(s).is_none() {
                return Err(Error::Domain(format!("unknown suite id {s}")));
            }
        }
        Ok(REGISTRY.iter().filter(|e| self.suites.iter().any(|s| s == e.id)).collect())
    }
}

/// One evaluated case.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRow {
    pub id: &'static str,
    pub params: Params,
    #[serde(serialize_with = "ser_num")]
    pub lhs: f64,
    #[serde(serialize_with = "ser_num")]
    pub rhs: f64,
    #[serde(serialize_with = "ser_num")]
    pub abs_err: f64,
    #[serde(serialize_with = "ser_num")]
    pub rel_err: f64,
    pub status: Status,
    pub terms_used: usize,
    #[serde(serialize_with = "ser_num")]
    pub tolerance: f64,
    pub diagnostic: Option<String>,
    #[serde(serialize_with = "ser_num")]
    pub condition: f64,
    pub redraws: usize,
}

fn ser_num<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_num(*x))
}

impl ResultRow {
    fn new(id: &'static str, e: Evaluation) -> Self {
        let r = e.result;
        ResultRow {
            id,
            params: e.params,
            condition: e.condition,
            redraws: e.redraws,
            lhs: r.lhs,
            rhs: r.rhs,
            abs_err: r.abs_err,
            rel_err: r.rel_err,
            status: r.status,
            terms_used: r.terms_used,
            tolerance: r.tolerance,
            diagnostic: r.diagnostic,
        }
    }
}

/// Counts by status.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    #[serde(rename = "skipped-pole")]
    pub skipped_pole: usize,
    pub diverged: usize,
}

impl Summary {
    pub fn tally(rows: &[ResultRow]) -> Self {
        let mut s = Summary { total: rows.len(), ..Summary::default() };
        for r in rows {
            match r.status {
                Status::Pass => s.pass += 1,
                Status::Fail => s.fail += 1,
                Status::SkippedPole => s.skipped_pole += 1,
                Status::Diverged => s.diverged += 1,
            }
        }
        s
    }

    /// Zero failures and zero divergences; skipped poles are allowed.
    pub fn clean(&self) -> bool {
        self.fail == 0 && self.diverged == 0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub version: &'static str,
    pub config: SuiteConfig,
    pub results: Vec<ResultRow>,
    pub summary: Summary,
    pub wall_time_s: f64,
}

/// One unit of work: an entry, a `q`, a sample index.
#[derive(Clone, Copy)]
struct CaseKey {
    entry: &'static Entry,
    q: Base,
    index: usize,
}

/// Evaluates `samples` cases of each entry, per `q` where the entry uses one.
pub fn run_entries(
    entries: &[&'static Entry],
    q_values: &[Base],
    samples: usize,
    seed: u64,
    exec: Execution,
    policy: &TruncationPolicy,
) -> Vec<ResultRow> {
    let mut keys = Vec::new();
    for &entry in entries {
        let qs: &[Base] = if entry.uses_q { q_values } else { &q_values[..1] };
        for &q in qs {
            for index in 0..samples {
                keys.push(CaseKey { entry, q, index });
            }
        }
    }
    par::map(&keys, exec, |k| ResultRow::new(k.entry.id, k.entry.evaluate(k.q, k.index, seed, policy)))
}

/// Runs a validated configuration.
pub fn run_suite(config: &SuiteConfig) -> Result<Report> {
    let entries = config.entries()?;
    let start = Instant::now();
    let policy = TruncationPolicy::default();
    let mut results =
        run_entries(&entries, &config.q_values, config.samples_per_identity, config.seed, config.execution, &policy);
    for row in &mut results {
        if let Some(&tol) = config.tol_overrides.get(row.id) {
            if matches!(row.status, Status::Pass | Status::Fail) && row.tolerance > 0.0 {
                row.tolerance = tol;
                row.status = if row.rel_err <= tol { Status::Pass } else { Status::Fail };
            }
        }
    }
    let summary = Summary::tally(&results);
    Ok(Report {
        version: env!("CARGO_PKG_VERSION"),
        config: config.clone(),
        results,
        summary,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }

    /// The deterministic part of the report: results and summary. The config
    /// echo and wall time describe the invocation, not the outcome.
    pub fn payload_json(&self) -> String {
        serde_json::to_string(&(&self.results, &self.summary)).expect("report is serializable")
    }

    /// One row per result; parameters are flattened as `name=value` pairs.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "id",
            "params",
            "lhs",
            "rhs",
            "abs_err",
            "rel_err",
            "status",
            "terms_used",
            "tolerance",
            "diagnostic",
            "condition",
            "redraws",
        ])
        .expect("in-memory write");
        for r in &self.results {
            let params: Vec<String> = r.params.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
            w.write_record([
                r.id.to_string(),
                params.join(";"),
                fmt_num(r.lhs),
                fmt_num(r.rhs),
                fmt_num(r.abs_err),
                fmt_num(r.rel_err),
                r.status.as_str().to_string(),
                r.terms_used.to_string(),
                fmt_num(r.tolerance),
                r.diagnostic.clone().unwrap_or_default(),
                fmt_num(r.condition),
                r.redraws.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }
}

impl std::fmt::Display for Group {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Group::Inversion => "inversion",
            Group::Lemma => "lemma",
            Group::Expansion => "expansion",
            Group::Terminating => "terminating",
            Group::QIntegral => "q-integral",
            Group::Classical => "classical",
            Group::QLimit => "q-limit",
            Group::Halfline => "half-line",
        };
        f.write_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn quick(ids: &[&str], exec: Execution) -> SuiteConfig {
        SuiteConfig {
            suites: ids.iter().map(|s| s.to_string()).collect(),
            samples_per_identity: 3,
            execution: exec,
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn registry_ids_are_unique_and_described() {
        let ids: HashSet<_> = REGISTRY.iter().map(|e| e.id).collect();
        assert_eq!(ids.len(), REGISTRY.len());
        assert!(REGISTRY.iter().all(|e| !e.description.is_empty()));
        assert!(lookup("q_gauss").is_some() && lookup("nope").is_none());
    }

    #[test]
    fn config_validation() {
        let mut c = SuiteConfig::default();
        c.suites.clear();
        assert!(c.entries().is_err());
        let c = SuiteConfig { samples_per_identity: 0, ..SuiteConfig::default() };
        assert!(c.entries().is_err());
        let c = SuiteConfig { suites: vec!["bogus".into()], ..SuiteConfig::default() };
        assert!(c.entries().is_err());
        let mut c = SuiteConfig::default();
        c.tol_overrides.insert("q_gauss".into(), -1.0);
        assert!(c.entries().is_err());
        assert_eq!(SuiteConfig::default().entries().unwrap().len(), REGISTRY.len());
    }

    #[test]
    fn sequential_and_parallel_payloads_match() {
        let ids = ["q_gauss", "curious_expansion", "beta"];
        let a = run_suite(&quick(&ids, Execution::Sequential)).unwrap();
        let b = run_suite(&quick(&ids, Execution::Parallel)).unwrap();
        assert_eq!(a.results, b.results);
        assert_eq!(a.summary, b.summary);
    }

    #[test]
    fn q_independent_entries_run_once_per_sample() {
        let r = run_suite(&quick(&["beta", "q_kummer"], Execution::Sequential)).unwrap();
        assert_eq!(r.results.iter().filter(|x| x.id == "beta").count(), 3);
        assert_eq!(r.results.iter().filter(|x| x.id == "q_kummer").count(), 9);
        assert_eq!(r.summary.total, 12);
        assert!(r.summary.clean(), "{:?}", r.summary);
    }

    #[test]
    fn tolerance_override_regrades() {
        let mut c = quick(&["q_kummer"], Execution::Sequential);
        c.tol_overrides.insert("q_kummer".into(), 1e-300);
        let r = run_suite(&c).unwrap();
        assert!(r.results.iter().all(|x| x.tolerance == 1e-300));
        assert_eq!(r.summary.pass + r.summary.fail, r.summary.total);
        assert!(r.summary.fail > 0);
    }

    #[test]
    fn report_shapes() {
        let r = run_suite(&quick(&["q_gauss"], Execution::Sequential)).unwrap();
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        let keys: Vec<_> = json.as_object().unwrap().keys().cloned().collect();
        for k in ["version", "config", "results", "summary", "wall_time_s"] {
            assert!(keys.contains(&k.to_string()), "{k}");
        }
        let row = &json["results"][0];
        for k in ["id", "params", "lhs", "rhs", "abs_err", "rel_err", "status", "terms_used"] {
            assert!(!row[k].is_null(), "{k}");
        }
        assert_eq!(row["params"]["q"], "2.9999999999999999e-1");
        let csv = r.to_csv();
        assert!(csv.starts_with("id,params,lhs,rhs,abs_err,rel_err,status,terms_used"));
        assert_eq!(csv.lines().count(), 1 + r.results.len());
    }

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23] {
            assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn selector_names_round_trip() {
        for s in BetaSelector::ALL {
            assert_eq!(parse_selector(selector_name(s)), Some(s));
        }
    }
}
