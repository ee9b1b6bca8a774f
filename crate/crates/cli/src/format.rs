//! Text, CSV and JSON rendering shared by the subcommands.

use std::io::Write;

use num_rational::BigRational;
use rod_flat::numeric::{format_ratio, format_sig};
use rod_flat::{NumericMode, OperatorSeries};
use serde_json::{json, Value};

/// Coefficient as text: `n/d` in exact mode, scientific notation otherwise.
pub fn coeff(r: &BigRational, mode: NumericMode) -> String {
    match mode {
        NumericMode::Exact => format_ratio(r),
        NumericMode::Float { .. } => format_sig(r, mode.display_digits()),
    }
}

/// Coefficient `j` of a series, or an empty cell past its end.
pub fn series_cell(s: &OperatorSeries, j: usize) -> String {
    if j < s.len() {
        coeff(&s.coeff_ratio(j), s.mode())
    } else {
        String::new()
    }
}

pub fn series_json(s: &OperatorSeries) -> Value {
    json!({
        "scale": format_ratio(&s.scale),
        "order": s.order,
        "mode": s.mode().to_string(),
        "coeffs": (0..s.len()).map(|j| series_cell(s, j)).collect::<Vec<_>>(),
    })
}

/// Streams a cofactor array as a `CoshPoly` JSON object, skipping zeros.
pub fn write_array_json(w: &mut dyn Write, coeffs: &[i64]) -> std::io::Result<()> {
    write!(w, "{{\"terms\":[")?;
    let mut first = true;
    for (k, c) in coeffs.iter().enumerate().filter(|(_, c)| **c != 0) {
        if !first {
            write!(w, ",")?;
        }
        first = false;
        write!(w, "[{k},\"{c}/1\"]")?;
    }
    write!(w, "]}}")
}

pub fn write_json(out: &mut dyn Write, v: &Value) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, v)?;
    writeln!(out)
}

/// A CSV writer over any byte sink.
pub fn csv_writer(out: &mut dyn Write) -> csv::Writer<&mut dyn Write> {
    csv::WriterBuilder::new().from_writer(out)
}
