use num_rational::BigRational;
use rod_flat::numeric::{agreeing_digits, parse_decimal};
use rod_flat::{run_experiment, NumericMode, TargetValue};

// Normalized x^20 coefficients of L1, evaluated independently in exact rational arithmetic.
const TOP_L1: [(&str, &str); 7] = [
    ("3/2", "-2.73275020441209186659e-15"),
    ("17/12", "-2.76323947769095544936e-16"),
    ("99/70", "-2.41641302617377670180e-16"),
    ("577/408", "-2.47095494832098253011e-16"),
    ("3363/2378", "-2.47088861906850279835e-16"),
    ("19601/13860", "-2.47093519738964866570e-16"),
    ("114243/80782", "-2.47093514000715802932e-16"),
];

fn close(x: &BigRational, literal: &str, digits: f64) -> bool {
    agreeing_digits(x, &parse_decimal(literal).unwrap()) >= digits
}

#[test]
fn sqrt_two_table_exact() {
    let t = TargetValue::sqrt(2).unwrap();
    let report = run_experiment(&t, 7, 10, NumericMode::Exact).unwrap();
    assert_eq!(report.rows.len(), 7);
    for (row, (frac, value)) in report.rows.iter().zip(TOP_L1) {
        assert_eq!(row.fraction(), frac);
        assert!(
            close(&row.top_l1(), value, 20.0),
            "{frac}: {}",
            row.top_l1()
        );
    }
}

#[test]
fn sqrt_two_table_float() {
    let t = TargetValue::sqrt(2).unwrap();
    let report = run_experiment(&t, 7, 10, NumericMode::Float { bits: 64 }).unwrap();
    for (row, (frac, value)) in report.rows.iter().zip(TOP_L1) {
        assert!(
            close(&row.top_l1(), value, 12.0),
            "{frac}: {}",
            row.top_l1()
        );
    }
}
