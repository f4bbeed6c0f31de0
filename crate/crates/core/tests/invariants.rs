//! Property tests for the numerical building blocks.

use proptest::prelude::*;
use qsv_core::classical::beta_fn;
use qsv_core::identities::check_q_gauss;
use qsv_core::inversion::{delta_window, rational, seq, window_is_exact, MatrixPair};
use qsv_core::par::Execution;
use qsv_core::qcore::{qpoch_finite, qpoch_infinite, qpoch_ratio};
use qsv_core::qintegral::{q_integrate, QIntegrand};
use qsv_core::quadrature::{integrate, QuadratureRequest};
use qsv_core::sample::Sampler;
use qsv_core::sum::compensated_sum;
use qsv_core::{Base, Error, TruncationPolicy};

fn base() -> impl Strategy<Value = Base> {
    (0.05f64..0.95).prop_map(|q| Base::new(q).unwrap())
}

fn close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * x.abs().max(y.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn finite_product_recurrence(a in -3.0f64..3.0, q in base(), n in 0i64..30) {
        let next = qpoch_finite(a, q, n + 1).unwrap();
        let step = qpoch_finite(a, q, n).unwrap() * (1.0 - a * q.powi(n));
        prop_assert!(close(next, step, 1e-12) || (next - step).abs() < 1e-14);
    }

    #[test]
    fn infinite_product_splits(a in -0.9f64..0.9, q in base(), n in 0i64..20) {
        let pol = TruncationPolicy::default();
        let whole = qpoch_infinite(a, q, &pol).unwrap();
        let split = qpoch_finite(a, q, n).unwrap() * qpoch_infinite(a * q.powi(n), q, &pol).unwrap();
        prop_assert!(close(whole, split, 1e-12));
    }

    #[test]
    fn ratio_matches_quotient(a in -0.9f64..0.9, b in -0.9f64..0.9, q in base()) {
        let pol = TruncationPolicy::default();
        let r = qpoch_ratio(&[a], &[b], q, &pol).unwrap();
        let direct = qpoch_infinite(a, q, &pol).unwrap() / qpoch_infinite(b, q, &pol).unwrap();
        prop_assert!(close(r, direct, 1e-11));
    }

    #[test]
    fn q_gauss_holds_on_its_domain(a in 1.2f64..3.0, b in 1.2f64..3.0, c in -0.8f64..0.8, q in base()) {
        let r = check_q_gauss(a, b, c, q, &TruncationPolicy::default());
        prop_assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn jackson_integral_of_one(q in base()) {
        let one = QIntegrand::new("one", |_| Ok(1.0));
        let v = q_integrate(&one, q, &TruncationPolicy::default()).unwrap();
        prop_assert!(close(v.value, 1.0, 1e-12));
    }

    #[test]
    fn quadrature_reproduces_beta(alpha in 0.2f64..4.0, beta in 0.2f64..4.0) {
        let f = move |t: f64, s: f64| t.powf(alpha - 1.0) * s.powf(beta - 1.0);
        let v = integrate(&QuadratureRequest::new(&f, (alpha - 1.0, beta - 1.0))).unwrap();
        prop_assert!(close(v.value, beta_fn(alpha, beta).unwrap(), 1e-10), "{} {:?}", v.value, beta_fn(alpha, beta));
    }

    #[test]
    fn compensated_sum_is_order_independent(mut xs in prop::collection::vec(-1e3f64..1e3, 1..200)) {
        let forward = compensated_sum(&xs);
        xs.reverse();
        prop_assert!((forward - compensated_sum(&xs)).abs() <= 1e-12 * xs.iter().map(|x| x.abs()).sum::<f64>());
    }

    #[test]
    fn sampler_is_a_pure_function_of_its_key(index in 0usize..1000, seed in any::<u64>()) {
        let draw = || {
            let mut s = Sampler::new("q_gauss", 0.5, index, seed);
            (s.uniform(0.0, 1.0), s.int(-5, 5), s.rational((-9, 9), 5))
        };
        prop_assert_eq!(draw(), draw());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn general_pairs_invert_exactly(
        a0 in -5i64..5, a1 in 1i64..4, c0 in -5i64..5, c1 in 5i64..9, d in 1i64..7,
    ) {
        // A vanishing denominator must be reported, never produce a wrong window.
        let pair = MatrixPair::General {
            a: seq(move |j| rational(a0 + a1 * j, 1)),
            c: seq(move |j| rational(c0 + c1 * j, 1)),
            d: rational(d, 1),
        };
        match delta_window(&pair, 6, Execution::Sequential) {
            Ok(cells) => prop_assert!(window_is_exact(&cells)),
            Err(e) => prop_assert!(matches!(e, Error::ZeroDenominator { .. }), "{e}"),
        }
    }
}
