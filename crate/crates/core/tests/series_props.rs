use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use proptest::prelude::*;
use rod_flat::series::ulp_distance;
use rod_flat::{
    bezout_cosh, expand, identity_residual, normalize_pair, NumericMode, OperatorSeries,
};

fn valid_pair(max_sum: u64) -> impl Strategy<Value = (u64, u64)> {
    (1..max_sum, 1..max_sum).prop_filter_map("coprime, not both odd", move |(a, b)| {
        let ok = a < b && a + b <= max_sum && a.gcd(&b) == 1 && (a % 2 == 0 || b % 2 == 0);
        ok.then_some((a, b))
    })
}

fn scaled(
    a: u64,
    b: u64,
    order: usize,
    mode: NumericMode,
) -> (OperatorSeries, OperatorSeries, BigRational) {
    let (pair, _) = bezout_cosh(a, b).unwrap();
    let s = BigRational::new(BigInt::from(1), BigInt::from(a));
    (
        expand(&pair.l1, &s, order, mode),
        expand(&pair.l2, &s, order, mode),
        BigRational::new(BigInt::from(b), BigInt::from(a)),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn exact_residual_vanishes((a, b) in valid_pair(160), order in 0usize..=40) {
        let (s1, s2, r) = scaled(a, b, order, NumericMode::Exact);
        prop_assert!(identity_residual(&s1, &s2, &r).unwrap().is_zero());
        let (n1, n2) = normalize_pair(&s1, &s2, &r).unwrap();
        prop_assert!(identity_residual(&n1, &n2, &r).unwrap().is_zero());
        prop_assert_eq!(n1.coeff_ratio(0), BigRational::from_integer(1.into()));
        prop_assert_eq!(n2.coeff_ratio(0), BigRational::from_integer(0.into()));
    }

    #[test]
    fn float_within_four_ulps((a, b) in valid_pair(200)) {
        let (e1, e2, _) = scaled(a, b, 20, NumericMode::Exact);
        let (f1, f2, _) = scaled(a, b, 20, NumericMode::Float { bits: 64 });
        for j in 0..=20 {
            for (e, f) in [(&e1, &f1), (&e2, &f2)] {
                let d = ulp_distance(&f.coeff_ratio(j), &e.coeff_ratio(j), 64);
                prop_assert!(d <= 4.0, "j={} off by {} ulps", j, d);
            }
        }
    }

    #[test]
    fn float_mode_is_deterministic((a, b) in valid_pair(120), bits in 53u32..200) {
        let mode = NumericMode::Float { bits };
        prop_assert_eq!(scaled(a, b, 12, mode), scaled(a, b, 12, mode));
    }
}

#[test]
fn float_keeps_exact_zero_coefficients() {
    let (e1, e2, _) = scaled(15, 154, 20, NumericMode::Exact);
    let (f1, f2, _) = scaled(15, 154, 20, NumericMode::Float { bits: 64 });
    for j in 0..=20 {
        for (e, f) in [(&e1, &f1), (&e2, &f2)] {
            if e.coeff_ratio(j) == BigRational::from_integer(0.into()) {
                assert_eq!(f.coeff_ratio(j), e.coeff_ratio(j), "j={j}");
            }
        }
    }
    assert!(ulp_distance(&f2.coeff_ratio(1), &e2.coeff_ratio(1), 64) <= 4.0);
}
