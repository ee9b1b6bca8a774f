use num_rational::BigRational;
use proptest::prelude::*;
use rod_flat::planning::{energy, max_deviation, uniform_state};
use rod_flat::{
    apply_operator, cosh_series, simulate, synthesize_control, transfer_error, ControlProfile,
    DerivativeJet, GevreySpec, GevreyTrajectory, NumericMode, RodModel, StencilSign,
};

fn rest_to_rest() -> f64 {
    let spec = GevreySpec::new(2.0, 1.0, 0.0, 1.0).unwrap();
    let model = RodModel::one_sided(1, 20).unwrap();
    let grid = ControlProfile::uniform_grid(1.0, 401);
    let profile = synthesize_control(1, None, &spec, 15, &grid).unwrap();
    let traj = simulate(&model, &profile, &uniform_state(&model, 0.0), 0.25 / 400.0).unwrap();
    transfer_error(&traj, &spec)
}

#[test]
fn simple_case_transfer() {
    let err = rest_to_rest();
    assert!(err < 1e-2, "transfer error {err}");
}

#[test]
fn two_sided_transfer() {
    let spec = GevreySpec::new(2.0, 2.0, 0.0, 1.0).unwrap();
    let model = RodModel::new(1, 2, 8, StencilSign::Laplacian).unwrap();
    let grid = ControlProfile::uniform_grid(2.0, 801);
    let profile = synthesize_control(1, Some(2), &spec, 15, &grid).unwrap();
    let traj = simulate(&model, &profile, &uniform_state(&model, 0.0), 0.25 / 64.0).unwrap();
    let err = transfer_error(&traj, &spec);
    assert!(err < 1e-2, "transfer error {err}");
}

#[test]
fn constant_input_reaches_steady_state() {
    let model = RodModel::one_sided(1, 10).unwrap();
    let grid = ControlProfile::uniform_grid(12.0, 121);
    let profile = ControlProfile::constant(grid, 0.4);
    let init: Vec<f64> = (0..model.dim()).map(|i| (i as f64 * 0.7).sin()).collect();
    let traj = simulate(&model, &profile, &init, 0.25 / 100.0).unwrap();
    assert!(max_deviation(traj.final_nodes(), 0.4) < 1e-8);
}

#[test]
fn energy_and_deviation_do_not_grow() {
    let model = RodModel::new(2, 3, 4, StencilSign::Laplacian).unwrap();
    let grid = ControlProfile::uniform_grid(1.0, 201);
    let profile = ControlProfile::constant(grid, 0.0);
    let init: Vec<f64> = (0..model.dim())
        .map(|i| ((i * 7919) % 13) as f64 - 6.0)
        .collect();
    let traj = simulate(&model, &profile, &init, 0.25 / 16.0).unwrap();
    for w in traj.nodes.windows(2) {
        assert!(energy(&w[1], 0.0) <= energy(&w[0], 0.0) + 1e-8);
        assert!(max_deviation(&w[1], 0.0) <= max_deviation(&w[0], 0.0) + 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn jet_derivatives_match_finite_differences(t in 0.25f64..0.75) {
        let tr = GevreyTrajectory::new(GevreySpec::new(2.0, 1.0, 0.0, 1.0).unwrap());
        let h = 1e-4;
        let central = |m: usize, h: f64| {
            (tr.jet(t + h, m).values[m] - tr.jet(t - h, m).values[m]) / (2.0 * h)
        };
        let jet = tr.jet(t, 4).values;
        for m in 1..=4 {
            let fd = (4.0 * central(m - 1, h / 2.0) - central(m - 1, h)) / 3.0;
            let rel = (fd - jet[m]).abs() / jet[m].abs();
            prop_assert!(rel < 1e-6, "m={} rel={}", m, rel);
        }
    }

    #[test]
    fn operator_is_linear(
        x in prop::collection::vec(-10.0f64..10.0, 6),
        y in prop::collection::vec(-10.0f64..10.0, 6),
        alpha in -3.0f64..3.0,
        r in 0u32..4,
    ) {
        let s = cosh_series(&BigRational::from_integer(r.into()), 5, NumericMode::Exact);
        let jet = |v: Vec<f64>| DerivativeJet { t: 0.0, values: v };
        let combo: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + alpha * b).collect();
        let lhs = apply_operator(&s, &jet(combo)).unwrap();
        let rhs = apply_operator(&s, &jet(x)).unwrap() + alpha * apply_operator(&s, &jet(y)).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
    }
}
