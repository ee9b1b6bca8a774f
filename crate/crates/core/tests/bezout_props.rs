use std::collections::BTreeSet;

use num_integer::Integer;
use num_rational::BigRational;
use proptest::prelude::*;
use rod_flat::{bezout_arrays, bezout_cosh, verify_identity, CoshPoly, Error, Side};

fn valid_pair(max_sum: u64) -> impl Strategy<Value = (u64, u64)> {
    (1..max_sum, 1..max_sum).prop_filter_map("coprime, not both odd, a != b", move |(a, b)| {
        let ok = a + b <= max_sum && a.gcd(&b) == 1 && (a % 2 == 0 || b % 2 == 0);
        ok.then_some((a, b))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn trace_structure((a, b) in valid_pair(2000)) {
        let (pair, trace) = bezout_cosh(a, b).unwrap();
        let p = pair.problem;
        prop_assert_eq!(trace.steps.len(), p.step_count());

        let ks = trace.k_sequence();
        let expected: Vec<u64> = (0..p.a() + p.b()).filter(|k| k % 2 == 0).collect();
        let mut sorted = ks.clone();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, expected);

        for (step, sum) in trace.steps.iter().zip(trace.partial_sums(&p)) {
            let mut want = CoshPoly::one();
            want.add_term(step.k, BigRational::from_integer(step.d.into()));
            if step.is_final() {
                want = CoshPoly::one();
            }
            prop_assert_eq!(sum, want, "step {}", step.index);
        }

        let body = &trace.steps[..trace.steps.len() - 1];
        prop_assert!(body.iter().all(|s| s.c.abs() == 2 && s.k % 2 == 0));
        prop_assert!(body.windows(2).all(|w| w[0].c == -w[1].c));
        let last = trace.steps.last().unwrap();
        prop_assert_eq!((last.c.abs(), last.d), (1, 0));
    }

    #[test]
    fn cofactor_shape((a, b) in valid_pair(600)) {
        let (pair, trace) = bezout_cosh(a, b).unwrap();
        let (a, b) = (pair.problem.a(), pair.problem.b());
        prop_assert!(verify_identity(&pair).is_zero());
        prop_assert!(pair.l1.max_frequency().unwrap_or(0) < b);
        prop_assert!(pair.l2.max_frequency().unwrap_or(0) < a);
        prop_assert!(pair.l1.terms().all(|(k, _)| k % 2 == a % 2));
        prop_assert!(pair.l2.terms().all(|(k, _)| k % 2 == b % 2));
        for side in [Side::A, Side::B] {
            let fs: Vec<u64> = trace.steps.iter().filter(|s| s.alpha == side).map(|s| s.f).collect();
            let unique: BTreeSet<u64> = fs.iter().copied().collect();
            prop_assert_eq!(fs.len(), unique.len());
        }
    }

    #[test]
    fn arrays_agree_with_trace((a, b) in valid_pair(3000)) {
        let (pair, _) = bezout_cosh(a, b).unwrap();
        prop_assert_eq!(bezout_arrays(a, b).unwrap().to_pair(), pair);
    }

    #[test]
    fn argument_order_is_irrelevant((a, b) in valid_pair(500)) {
        prop_assert_eq!(bezout_cosh(a, b).unwrap().0.l1, bezout_cosh(b, a).unwrap().0.l1);
    }

    #[test]
    fn invalid_pairs_are_rejected(a in 1u64..500, b in 1u64..500) {
        let g = a.gcd(&b);
        match bezout_cosh(a, b) {
            Err(Error::CommonFactor(h)) => prop_assert!(g > 1 && h == g),
            Err(Error::BothOdd(..)) => prop_assert!(g == 1 && a % 2 == 1 && b % 2 == 1),
            Ok(_) => prop_assert!(g == 1 && (a % 2 == 0 || b % 2 == 0)),
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
    }
}

#[test]
fn twelve_seventeen() {
    let (pair, _) = bezout_cosh(12, 17).unwrap();
    let l1 = CoshPoly::from_int_terms([
        (12, 2),
        (2, 2),
        (8, 2),
        (16, -2),
        (6, -2),
        (4, -2),
        (14, -2),
        (10, 2),
        (0, 1),
    ]);
    let l2 = CoshPoly::from_int_terms([(7, -2), (3, -2), (11, 2), (1, 2), (9, 2), (5, -2)]);
    assert_eq!((pair.l1, pair.l2), (l1, l2));
}

#[test]
fn large_arrays() {
    let arrays = bezout_arrays(100_000, 100_001).unwrap();
    assert_eq!(arrays.l1.len(), 100_001);
    assert!(arrays.l1.iter().chain(&arrays.l2).all(|c| c.abs() <= 2));
    assert!(verify_identity(&arrays.to_pair()).is_zero());
}
