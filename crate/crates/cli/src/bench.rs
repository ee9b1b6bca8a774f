//! Wall-clock timing of the Bézout construction on `(2i, 2i+1)`.

use std::time::Instant;

use clap::ValueEnum;
use num_rational::BigRational;
use rod_flat::{bezout_arrays, expand, Error, NumericMode, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, ValueEnum)]
pub enum BenchMode {
    /// Cofactor arrays only.
    #[serde(rename = "arrays-only")]
    #[value(name = "arrays-only", alias = "arrays")]
    Arrays,
    /// Arrays, cofactor polynomials and their exact series to the given order.
    #[serde(rename = "with-series")]
    #[value(name = "with-series", alias = "series")]
    Series,
}

impl std::fmt::Display for BenchMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Arrays => "arrays-only",
            Self::Series => "with-series",
        })
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub min_size: u64,
    pub max_size: u64,
    pub modes: Vec<BenchMode>,
    pub order: usize,
    pub reps: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            min_size: 1 << 10,
            max_size: 1 << 20,
            modes: vec![BenchMode::Arrays, BenchMode::Series],
            order: 10,
            reps: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub a: u64,
    pub b: u64,
    pub size: u64,
    pub mode: BenchMode,
    pub order: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn rows_for(&self, mode: BenchMode) -> impl Iterator<Item = &BenchRow> {
        self.rows.iter().filter(move |r| r.mode == mode)
    }

    /// Least-squares slope of `log(seconds)` against `log(size)`.
    pub fn slope(&self, mode: BenchMode) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .rows_for(mode)
            .filter(|r| r.seconds > 0.0)
            .map(|r| ((r.size as f64).ln(), r.seconds.ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        (sxx > 0.0).then(|| sxy / sxx)
    }
}

/// Sizes `a+b = 4i+1` for `i` doubling from `min_size/4` while `a+b <= max_size`.
pub fn bench_pairs(min_size: u64, max_size: u64) -> Vec<(u64, u64)> {
    let mut i = (min_size / 4).max(1);
    let mut out = Vec::new();
    while 4 * i < max_size {
        out.push((2 * i, 2 * i + 1));
        i *= 2;
    }
    out
}

/// One timed construction in `mode`.
pub fn time_once(a: u64, b: u64, mode: BenchMode, order: usize) -> Result<f64> {
    let start = Instant::now();
    let arrays = bezout_arrays(a, b)?;
    match mode {
        BenchMode::Arrays => {
            std::hint::black_box(&arrays);
        }
        BenchMode::Series => {
            let pair = arrays.to_pair();
            let s = BigRational::new(1.into(), a.into());
            let s1 = expand(&pair.l1, &s, order, NumericMode::Exact);
            let s2 = expand(&pair.l2, &s, order, NumericMode::Exact);
            std::hint::black_box((s1, s2));
        }
    }
    Ok(start.elapsed().as_secs_f64())
}

/// Median of `reps` timed runs after one warm-up, per pair and mode. Rows run
/// sequentially.
pub fn bench(config: &BenchConfig) -> Result<BenchReport> {
    if config.max_size < 10 {
        return Err(Error::InvalidInput("max size must be at least 10".into()));
    }
    let reps = config.reps.max(3);
    let mut report = BenchReport::default();
    for &mode in &config.modes {
        for (a, b) in bench_pairs(config.min_size, config.max_size) {
            time_once(a, b, mode, config.order)?;
            let mut times = (0..reps)
                .map(|_| time_once(a, b, mode, config.order))
                .collect::<Result<Vec<f64>>>()?;
            times.sort_by(f64::total_cmp);
            report.rows.push(BenchRow {
                a,
                b,
                size: a + b,
                mode,
                order: if mode == BenchMode::Series {
                    config.order
                } else {
                    0
                },
                seconds: times[times.len() / 2],
            });
        }
    }
    Ok(report)
}
