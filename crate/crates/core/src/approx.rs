//! Continued-fraction convergents of a target ratio and the convergence
//! experiment: Bézout series for each admissible convergent `b/a`.

use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::bezout::bezout_cosh;
use crate::error::{Error, Result};
use crate::numeric::{parse_decimal, NumericMode};
use crate::series::{expand, normalize_pair, OperatorSeries};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TargetValue {
    /// `√n` for a positive non-square `n`.
    Sqrt(u64),
    /// A finite decimal literal, held exactly.
    Decimal(BigRational),
}

impl TargetValue {
    pub fn sqrt(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("sqrt argument must be positive".into()));
        }
        let r = n.sqrt();
        if r * r == n {
            return Err(Error::InvalidInput(format!(
                "sqrt({n}) = {r} is rational; pass it as a decimal"
            )));
        }
        Ok(Self::Sqrt(n))
    }

    pub fn decimal(literal: &str) -> Result<Self> {
        Ok(Self::Decimal(parse_decimal(literal)?))
    }

    /// Accepts `sqrt(n)` or a decimal literal.
    pub fn parse(spec: &str) -> Result<Self> {
        let s = spec.trim();
        if let Some(inner) = s.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
            let n = inner.trim().parse::<u64>().map_err(|_| {
                Error::NonQuadraticIrrationalUnsupported(format!(
                    "only sqrt of a positive integer is supported, got {s}"
                ))
            })?;
            return Self::sqrt(n);
        }
        if s.chars()
            .any(|c| c.is_ascii_alphabetic() && c != 'e' && c != 'E')
            || s.contains('(')
        {
            return Err(Error::NonQuadraticIrrationalUnsupported(s.to_string()));
        }
        Self::decimal(s)
    }

    /// Partial quotients, at most `limit` of them (fewer if the expansion terminates).
    pub fn partial_quotients(&self, limit: usize) -> Vec<BigInt> {
        match self {
            Self::Sqrt(n) => sqrt_quotients(*n, limit),
            Self::Decimal(r) => rational_quotients(r, limit),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Self::Sqrt(n) => (*n as f64).sqrt(),
            Self::Decimal(r) => crate::numeric::ratio_to_f64(r),
        }
    }
}

impl fmt::Display for TargetValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Sqrt(n) => write!(f, "sqrt({n})"),
            Self::Decimal(r) => write!(f, "{r}"),
        }
    }
}

/// Periodic expansion of a quadratic surd: `m' = d·q - m`, `d' = (n - m'^2)/d`,
/// `q' = floor((q_0 + m')/d')`.
fn sqrt_quotients(n: u64, limit: usize) -> Vec<BigInt> {
    let n = u128::from(n);
    let a0 = n.sqrt();
    let (mut m, mut d, mut q) = (0u128, 1u128, a0);
    let mut out = Vec::with_capacity(limit);
    for _ in 0..limit {
        out.push(BigInt::from(q));
        m = d * q - m;
        d = (n - m * m) / d;
        q = (a0 + m) / d;
    }
    out
}

fn rational_quotients(r: &BigRational, limit: usize) -> Vec<BigInt> {
    let (mut p, mut q) = (r.numer().clone(), r.denom().clone());
    let mut out = Vec::new();
    while out.len() < limit && !q.is_zero() {
        let (quot, rem) = p.div_mod_floor(&q);
        out.push(quot);
        p = std::mem::replace(&mut q, rem);
    }
    out
}

/// The convergent `b/a` of index `index`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Convergent {
    pub index: usize,
    pub b: BigInt,
    pub a: BigInt,
}

impl Convergent {
    pub fn value(&self) -> BigRational {
        BigRational::new(self.b.clone(), self.a.clone())
    }

    pub fn both_odd(&self) -> bool {
        self.a.is_odd() && self.b.is_odd()
    }

    /// `(a, b)` when both fit a machine word.
    pub fn as_u64(&self) -> Option<(u64, u64)> {
        Some((self.a.to_u64()?, self.b.to_u64()?))
    }
}

impl fmt::Display for Convergent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.b, self.a)
    }
}

/// The first `count` convergents via `p_i = q_i p_{i-1} + p_{i-2}`.
pub fn cf_expand(target: &TargetValue, count: usize) -> Vec<Convergent> {
    convergents(&target.partial_quotients(count))
}

fn convergents(quotients: &[BigInt]) -> Vec<Convergent> {
    let (mut p_prev, mut p) = (BigInt::zero(), BigInt::one());
    let (mut q_prev, mut q) = (BigInt::one(), BigInt::zero());
    quotients
        .iter()
        .enumerate()
        .map(|(index, c)| {
            let p_next = c * &p + &p_prev;
            let q_next = c * &q + &q_prev;
            p_prev = std::mem::replace(&mut p, p_next);
            q_prev = std::mem::replace(&mut q, q_next);
            Convergent {
                index,
                b: p.clone(),
                a: q.clone(),
            }
        })
        .collect()
}

pub fn parity_filter(cs: &[Convergent]) -> Vec<Convergent> {
    cs.iter().filter(|c| !c.both_odd()).cloned().collect()
}

/// The first `count` convergents that survive [`parity_filter`]; fewer when
/// the expansion is finite.
pub fn admissible_convergents(target: &TargetValue, count: usize) -> Vec<Convergent> {
    let mut limit = count.max(1) * 2;
    loop {
        let quotients = target.partial_quotients(limit);
        let kept = parity_filter(&convergents(&quotients));
        if kept.len() >= count || quotients.len() < limit {
            return kept.into_iter().take(count).collect();
        }
        limit *= 2;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub convergent: Convergent,
    /// Shorter length.
    pub a: u64,
    /// Longer length.
    pub b: u64,
    pub order: usize,
    pub raw_l1: OperatorSeries,
    pub raw_l2: OperatorSeries,
    pub l1: OperatorSeries,
    pub l2: OperatorSeries,
    pub wall_time: Duration,
}

impl ExperimentRow {
    /// Coefficient of `x^{2J}` in the normalized `L1`.
    pub fn top_l1(&self) -> BigRational {
        self.l1.coeff_ratio(self.order)
    }

    pub fn fraction(&self) -> String {
        format!("{}/{}", self.b, self.a)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub target: TargetValue,
    pub order: usize,
    pub mode: NumericMode,
    pub rows: Vec<ExperimentRow>,
}

/// Computes one row: Bézout cofactors for `(a, b)`, their series under `x -> x/a`,
/// and the normalized pair.
pub fn experiment_row(c: &Convergent, order: usize, mode: NumericMode) -> Result<ExperimentRow> {
    let start = Instant::now();
    let (a, b) = c
        .as_u64()
        .ok_or_else(|| Error::InvalidInput(format!("convergent {c} exceeds 64-bit lengths")))?;
    let (pair, _) = bezout_cosh(a, b)?;
    let (a, b) = (pair.problem.a(), pair.problem.b());
    let s = BigRational::new(BigInt::one(), BigInt::from(a));
    let ratio = BigRational::new(BigInt::from(b), BigInt::from(a));
    let raw_l1 = expand(&pair.l1, &s, order, mode);
    let raw_l2 = expand(&pair.l2, &s, order, mode);
    let (l1, l2) = normalize_pair(&raw_l1, &raw_l2, &ratio)?;
    Ok(ExperimentRow {
        convergent: c.clone(),
        a,
        b,
        order,
        raw_l1,
        raw_l2,
        l1,
        l2,
        wall_time: start.elapsed(),
    })
}

/// Runs the experiment on the first `count` admissible convergents, sequentially.
pub fn run_experiment(
    target: &TargetValue,
    count: usize,
    order: usize,
    mode: NumericMode,
) -> Result<ExperimentReport> {
    run_experiment_jobs(target, count, order, mode, 1)
}

/// Like [`run_experiment`], evaluating rows on `jobs` worker threads.
pub fn run_experiment_jobs(
    target: &TargetValue,
    count: usize,
    order: usize,
    mode: NumericMode,
    jobs: usize,
) -> Result<ExperimentReport> {
    if count == 0 || order == 0 {
        return Err(Error::InvalidInput(
            "count and order must be at least 1".into(),
        ));
    }
    let cs = admissible_convergents(target, count);
    let rows: Result<Vec<ExperimentRow>> = if jobs <= 1 {
        cs.iter().map(|c| experiment_row(c, order, mode)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidInput(e.to_string()))?;
        pool.install(|| {
            cs.par_iter()
                .map(|c| experiment_row(c, order, mode))
                .collect()
        })
    };
    let mut rows = rows?;
    rows.sort_by_key(|r| r.a);
    Ok(ExperimentReport {
        target: target.clone(),
        order,
        mode,
        rows,
    })
}
