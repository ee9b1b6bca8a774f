//! Even power series of cosh-basis operators after the substitution `x -> s·x`.
//!
//! `Σ c_k cosh(k s x) = Σ_j σ_j x^{2j}` with `σ_j = Σ_k c_k (k s)^{2j} / (2j)!`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::coshbasis::CoshPoly;
use crate::error::{Error, Result};
use crate::numeric::{
    float_abs, float_from_ratio, float_is_zero, float_log2_abs, float_mul, float_pairwise_sum,
    float_round, float_to_f64, float_to_ratio, ratio_to_f64, BinFloat, NumericMode,
};

/// Coefficients `σ_0..σ_J` in the arithmetic of the series' numeric mode.
#[derive(Debug, Clone, PartialEq)]
pub enum SeriesCoeffs {
    Exact(Vec<BigRational>),
    Float { bits: u32, values: Vec<BinFloat> },
}

/// A truncated even power series `Σ_{j<=J} σ_j x^{2j}`.
///
/// `scale` is the substitution used by [`expand`]; series derived by
/// products or sums carry the scale of their first operand.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSeries {
    pub scale: BigRational,
    pub order: usize,
    pub sigma: SeriesCoeffs,
}

impl OperatorSeries {
    fn from_exact(scale: BigRational, mode: NumericMode, values: Vec<BigRational>) -> Self {
        let order = values.len() - 1;
        let sigma = match mode {
            NumericMode::Exact => SeriesCoeffs::Exact(values),
            NumericMode::Float { bits } => SeriesCoeffs::Float {
                bits,
                values: values.iter().map(|v| float_from_ratio(v, bits)).collect(),
            },
        };
        Self {
            scale,
            order,
            sigma,
        }
    }

    pub fn mode(&self) -> NumericMode {
        match &self.sigma {
            SeriesCoeffs::Exact(_) => NumericMode::Exact,
            SeriesCoeffs::Float { bits, .. } => NumericMode::Float { bits: *bits },
        }
    }

    pub fn len(&self) -> usize {
        self.order + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Exact value of `σ_j` (floats convert without rounding).
    pub fn coeff_ratio(&self, j: usize) -> BigRational {
        match &self.sigma {
            SeriesCoeffs::Exact(v) => v[j].clone(),
            SeriesCoeffs::Float { values, .. } => float_to_ratio(&values[j]),
        }
    }

    pub fn coeff_f64(&self, j: usize) -> f64 {
        match &self.sigma {
            SeriesCoeffs::Exact(v) => ratio_to_f64(&v[j]),
            SeriesCoeffs::Float { values, .. } => float_to_f64(&values[j]),
        }
    }

    pub fn to_ratios(&self) -> Vec<BigRational> {
        (0..self.len()).map(|j| self.coeff_ratio(j)).collect()
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.coeff_f64(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        match &self.sigma {
            SeriesCoeffs::Exact(v) => v.iter().all(Zero::is_zero),
            SeriesCoeffs::Float { values, .. } => values.iter().all(float_is_zero),
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.mode() != other.mode() || self.order != other.order {
            return Err(Error::ModeMismatch(format!(
                "{} order {} vs {} order {}",
                self.mode(),
                self.order,
                other.mode(),
                other.order
            )));
        }
        Ok(())
    }

    /// Applies an exact coefficientwise map, rounding once per coefficient in float mode.
    fn zip_with<F>(&self, other: &Self, f: F) -> Result<Self>
    where
        F: Fn(&BigRational, &BigRational) -> BigRational,
    {
        self.check_compatible(other)?;
        let values = (0..self.len())
            .map(|j| f(&self.coeff_ratio(j), &other.coeff_ratio(j)))
            .collect();
        Ok(Self::from_exact(self.scale.clone(), self.mode(), values))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x - y)
    }

    pub fn scale_by(&self, factor: &BigRational) -> Self {
        let values = self.to_ratios().iter().map(|v| v * factor).collect();
        Self::from_exact(self.scale.clone(), self.mode(), values)
    }
}

fn factorials(order: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(order + 1);
    let mut f = BigInt::one();
    out.push(f.clone());
    for j in 1..=order {
        f *= BigInt::from(2 * j - 1) * BigInt::from(2 * j);
        out.push(f.clone());
    }
    out
}

/// Series of `p(s·x)` truncated after `x^{2J}`.
pub fn expand(p: &CoshPoly, s: &BigRational, order: usize, mode: NumericMode) -> OperatorSeries {
    let sigma = match mode {
        NumericMode::Exact => SeriesCoeffs::Exact(expand_exact(p, s, order)),
        NumericMode::Float { bits } => SeriesCoeffs::Float {
            bits,
            values: expand_float(p, s, order, bits),
        },
    };
    OperatorSeries {
        scale: s.clone(),
        order,
        sigma,
    }
}

/// Integer power sums `Σ C_k k^{2j}` with `C_k = c_k·D` for the common denominator `D`.
fn expand_exact(p: &CoshPoly, s: &BigRational, order: usize) -> Vec<BigRational> {
    let denom = p
        .terms()
        .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
    let mut weights: Vec<BigInt> = Vec::with_capacity(p.len());
    let mut squares: Vec<BigInt> = Vec::with_capacity(p.len());
    for (k, c) in p.terms() {
        weights.push(c.numer() * (&denom / c.denom()));
        squares.push(BigInt::from(k) * BigInt::from(k));
    }
    let fact = factorials(order);
    let s2 = s * s;
    let mut s_pow = BigRational::one();
    let mut out = Vec::with_capacity(order + 1);
    for (j, fj) in fact.iter().enumerate() {
        if j > 0 {
            for (w, k2) in weights.iter_mut().zip(&squares) {
                *w *= k2;
            }
            s_pow *= &s2;
        }
        let sum: BigInt = weights.iter().sum();
        out.push(BigRational::new(sum, &denom * fj) * &s_pow);
    }
    out
}

/// Extra working bits tried first; grown when the sum cancels.
const INITIAL_GUARD: u32 = 32;
const MAX_GUARD: u32 = 4096;

/// Float-mode expansion. Each power sum is accumulated pairwise at a working
/// precision `bits + guard`; when the observed cancellation
/// `log2(Σ|terms|) - log2|Σ terms|` could eat into the target precision the
/// sum is recomputed with more guard bits.
fn expand_float(p: &CoshPoly, s: &BigRational, order: usize, bits: u32) -> Vec<BinFloat> {
    let fact = factorials(order);
    let nodes: Vec<(BigRational, BigRational)> = p
        .terms()
        .map(|(k, c)| (BigRational::from_integer(k.into()) * s, c.clone()))
        .collect();
    let log_terms = (nodes.len().max(2) as f64).log2();
    let mut out: Vec<Option<BinFloat>> = vec![None; order + 1];
    let mut guard = INITIAL_GUARD;
    loop {
        let pending: Vec<usize> = (0..=order).filter(|j| out[*j].is_none()).collect();
        if pending.is_empty() {
            break;
        }
        let work = bits + guard;
        let last = *pending.last().unwrap();
        let sums = float_power_sums(&nodes, last, work);
        let mut needed = guard;
        for &j in &pending {
            let (sum, abs_sum) = &sums[j];
            let lost = float_log2_abs(abs_sum) - float_log2_abs(sum);
            let slack = (2.0 * j as f64 + 2.0 + log_terms).log2() + 4.0;
            let required = (lost + slack).ceil();
            if float_is_zero(abs_sum) || required <= f64::from(guard) {
                out[j] = Some(finish(sum, &fact[j], bits, work));
            } else if guard >= MAX_GUARD {
                // Still inside the rounding error of the largest terms: zero to this accuracy.
                let resolved = lost + slack < f64::from(work);
                out[j] = Some(if resolved {
                    finish(sum, &fact[j], bits, work)
                } else {
                    BinFloat::ZERO
                });
            } else if required.is_finite() {
                needed = needed.max(required as u32);
            } else {
                needed = needed.max(guard * 2);
            }
        }
        guard = needed.max(guard + 1).min(MAX_GUARD);
    }
    out.into_iter().map(|v| v.unwrap()).collect()
}

fn finish(sum: &BinFloat, fact: &BigInt, bits: u32, work: u32) -> BinFloat {
    let quotient =
        crate::numeric::float_div(sum, &crate::numeric::float_from_int(fact, work), work);
    float_round(&quotient, bits)
}

/// `(Σ c_k x_k^{2j}, Σ |c_k x_k^{2j}|)` for `j = 0..=last` at `work` bits.
fn float_power_sums(
    nodes: &[(BigRational, BigRational)],
    last: usize,
    work: u32,
) -> Vec<(BinFloat, BinFloat)> {
    let squares: Vec<BinFloat> = nodes
        .iter()
        .map(|(x, _)| float_from_ratio(&(x * x), work))
        .collect();
    let mut terms: Vec<BinFloat> = nodes
        .iter()
        .map(|(_, c)| float_from_ratio(c, work))
        .collect();
    let mut out = Vec::with_capacity(last + 1);
    for j in 0..=last {
        if j > 0 {
            for (t, sq) in terms.iter_mut().zip(&squares) {
                *t = float_mul(t, sq, work);
            }
        }
        let abs: Vec<BinFloat> = terms.iter().map(float_abs).collect();
        out.push((
            float_pairwise_sum(&terms, work),
            float_pairwise_sum(&abs, work),
        ));
    }
    out
}

/// Series of `cosh(r x)`: `σ_j = r^{2j}/(2j)!`.
pub fn cosh_series(r: &BigRational, order: usize, mode: NumericMode) -> OperatorSeries {
    let fact = factorials(order);
    let r2 = r * r;
    let mut pow = BigRational::one();
    let mut values = Vec::with_capacity(order + 1);
    for (j, fj) in fact.iter().enumerate() {
        if j > 0 {
            pow *= &r2;
        }
        values.push(&pow / BigRational::from_integer(fj.clone()));
    }
    OperatorSeries::from_exact(r.clone(), mode, values)
}

/// The constant series `1`.
fn unit_series(order: usize, mode: NumericMode) -> OperatorSeries {
    cosh_series(&BigRational::zero(), order, mode)
}

/// Cauchy product truncated after `x^{2J}`.
pub fn series_mul(a: &OperatorSeries, b: &OperatorSeries) -> Result<OperatorSeries> {
    a.check_compatible(b)?;
    let (x, y) = (a.to_ratios(), b.to_ratios());
    let values = (0..a.len())
        .map(|j| (0..=j).map(|i| &x[i] * &y[j - i]).sum())
        .collect();
    Ok(OperatorSeries::from_exact(
        a.scale.clone(),
        a.mode(),
        values,
    ))
}

/// `S1·cosh(x) + S2·cosh(ratio·x) - 1`, truncated.
pub fn identity_residual(
    s1: &OperatorSeries,
    s2: &OperatorSeries,
    ratio: &BigRational,
) -> Result<OperatorSeries> {
    s1.check_compatible(s2)?;
    let mode = s1.mode();
    let left = series_mul(s1, &cosh_series(&BigRational::one(), s1.order, mode))?;
    let right = series_mul(s2, &cosh_series(ratio, s1.order, mode))?;
    left.add(&right)?.sub(&unit_series(s1.order, mode))
}

/// Removes the constant term of `S2` using the trivial relation
/// `λ cosh(ratio·x) cosh(x) - λ cosh(x) cosh(ratio·x) = 0`, `λ = S2[0]`.
pub fn normalize_pair(
    s1: &OperatorSeries,
    s2: &OperatorSeries,
    ratio: &BigRational,
) -> Result<(OperatorSeries, OperatorSeries)> {
    s1.check_compatible(s2)?;
    let mode = s1.mode();
    let lambda = s2.coeff_ratio(0);
    if lambda.is_zero() {
        return Ok((s1.clone(), s2.clone()));
    }
    let n1 = s1.add(&cosh_series(ratio, s1.order, mode).scale_by(&lambda))?;
    let n2 = s2.sub(&cosh_series(&BigRational::one(), s2.order, mode).scale_by(&lambda))?;
    Ok((n1, n2))
}

/// Distance between two values measured in units in the last place of `exact`
/// at `bits` significand bits.
pub fn ulp_distance(approx: &BigRational, exact: &BigRational, bits: u32) -> f64 {
    if exact.is_zero() {
        return if approx.is_zero() { 0.0 } else { f64::INFINITY };
    }
    let e = crate::numeric::float_from_ratio(&exact.abs(), 53);
    let exponent = float_log2_abs(&e).floor() as i64 - i64::from(bits) + 1;
    let ulp = if exponent >= 0 {
        BigRational::from_integer(BigInt::one() << exponent as usize)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-exponent) as usize)
    };
    ratio_to_f64(&((approx - exact).abs() / ulp))
}
