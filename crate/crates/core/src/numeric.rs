//! Numeric plumbing: rational text formats, decimal rendering, and the
//! arbitrary-precision binary floats used by the float series mode.

use std::fmt;

use dashu_float::round::mode::HalfEven;
use dashu_float::{Context, FBig, Repr};
use dashu_int::{
    ops::{BitTest, UnsignedAbs},
    IBig,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default float precision: 64 significant bits, about 19 decimal digits.
pub const DEFAULT_FLOAT_BITS: u32 = 64;

/// Arithmetic used when expanding operator series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NumericMode {
    Exact,
    /// Binary floating point with the given number of significand bits.
    Float {
        bits: u32,
    },
}

impl NumericMode {
    pub fn float(bits: u32) -> Result<Self> {
        if bits < 53 {
            return Err(Error::InvalidPrecision(bits));
        }
        Ok(Self::Float { bits })
    }

    /// Smallest precision holding `digits` significant decimal digits (never below 53 bits).
    pub fn from_digits(digits: u32) -> Result<Self> {
        if digits == 0 {
            return Err(Error::InvalidPrecision(0));
        }
        let bits = (f64::from(digits) * std::f64::consts::LOG2_10).ceil() as u32;
        Self::float(bits.max(53))
    }

    /// Number of decimal digits worth printing for values in this mode.
    pub fn display_digits(&self) -> usize {
        match self {
            Self::Exact => 20,
            Self::Float { bits } => {
                ((f64::from(*bits) * std::f64::consts::LOG10_2).floor() as usize).max(1)
            }
        }
    }
}

impl Default for NumericMode {
    fn default() -> Self {
        Self::Float {
            bits: DEFAULT_FLOAT_BITS,
        }
    }
}

impl fmt::Display for NumericMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Exact => write!(f, "exact"),
            Self::Float { bits } => write!(f, "float({bits})"),
        }
    }
}

pub type BinFloat = FBig<HalfEven, 2>;

pub(crate) fn to_ibig(n: &BigInt) -> IBig {
    IBig::from_le_bytes(&n.to_signed_bytes_le())
}

pub(crate) fn from_ibig(n: &IBig) -> BigInt {
    BigInt::from_signed_bytes_le(&n.to_le_bytes())
}

fn ctx(bits: u32) -> Context<HalfEven> {
    Context::new(bits as usize)
}

/// `r` rounded to nearest (ties to even) at `bits` significand bits.
pub fn float_from_ratio(r: &BigRational, bits: u32) -> BinFloat {
    let num = Repr::<2>::new(to_ibig(r.numer()), 0);
    let den = Repr::<2>::new(to_ibig(r.denom()), 0);
    ctx(bits)
        .div(&num, &den)
        .expect("denominator of a BigRational is nonzero")
        .value()
}

pub fn float_from_int(n: &BigInt, bits: u32) -> BinFloat {
    ctx(bits).convert_int::<2>(to_ibig(n)).value()
}

/// Exact value of a binary float.
pub fn float_to_ratio(x: &BinFloat) -> BigRational {
    let repr = x.repr();
    let sig = from_ibig(repr.significand());
    let exp = repr.exponent();
    if exp >= 0 {
        BigRational::from_integer(sig << exp as usize)
    } else {
        BigRational::new(sig, BigInt::one() << (-exp) as usize)
    }
}

pub fn float_add(x: &BinFloat, y: &BinFloat, bits: u32) -> BinFloat {
    ctx(bits)
        .add(x.repr(), y.repr())
        .expect("finite add")
        .value()
}

pub fn float_sub(x: &BinFloat, y: &BinFloat, bits: u32) -> BinFloat {
    ctx(bits)
        .sub(x.repr(), y.repr())
        .expect("finite sub")
        .value()
}

pub fn float_mul(x: &BinFloat, y: &BinFloat, bits: u32) -> BinFloat {
    ctx(bits)
        .mul(x.repr(), y.repr())
        .expect("finite mul")
        .value()
}

pub fn float_div(x: &BinFloat, y: &BinFloat, bits: u32) -> BinFloat {
    ctx(bits)
        .div(x.repr(), y.repr())
        .expect("finite nonzero div")
        .value()
}

pub fn float_round(x: &BinFloat, bits: u32) -> BinFloat {
    x.clone().with_precision(bits as usize).value()
}

pub fn float_abs(x: &BinFloat) -> BinFloat {
    if *x.repr().significand() < IBig::ZERO {
        -x.clone()
    } else {
        x.clone()
    }
}

pub fn float_is_zero(x: &BinFloat) -> bool {
    x.repr().significand().is_zero()
}

pub fn float_to_f64(x: &BinFloat) -> f64 {
    x.to_f64().value()
}

/// Approximate `log2 |x|`; `-inf` for zero.
pub(crate) fn float_log2_abs(x: &BinFloat) -> f64 {
    let repr = x.repr();
    let sig = repr.significand();
    if sig.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = sig.unsigned_abs().bit_len() as f64;
    bits + repr.exponent() as f64
}

/// Pairwise (cascade) summation at `bits` precision, in a fixed order.
pub(crate) fn float_pairwise_sum(values: &[BinFloat], bits: u32) -> BinFloat {
    match values.len() {
        0 => BinFloat::ZERO,
        1 => float_round(&values[0], bits),
        n => {
            let (lo, hi) = values.split_at(n / 2);
            float_add(
                &float_pairwise_sum(lo, bits),
                &float_pairwise_sum(hi, bits),
                bits,
            )
        }
    }
}

/// Formats a rational as `"num/den"`, always including the denominator.
pub fn format_ratio(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"num/den"` or a bare integer.
pub fn parse_ratio(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidInput(format!("not a rational number: {s:?}"));
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Parses a finite decimal literal such as `-1.25`, `3`, or `1.5e-3` exactly.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidInput(format!("not a finite decimal literal: {s:?}"));
    let s = s.trim();
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(digits.parse::<BigInt>().map_err(|_| bad())?);
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let pow = num_traits::pow(ten, scale.unsigned_abs() as usize);
    if scale >= 0 {
        value *= BigRational::from_integer(pow);
    } else {
        value /= BigRational::from_integer(pow);
    }
    Ok(if neg { -value } else { value })
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Decimal exponent `e` with `10^e <= |r| < 10^(e+1)`; `r` must be nonzero.
fn decimal_exponent(r: &BigRational) -> i64 {
    let n = r.numer().abs();
    let d = r.denom().clone();
    let mut e = n.to_string().len() as i64 - d.to_string().len() as i64;
    let ten = BigInt::from(10);
    let pow = |k: i64| num_traits::pow(ten.clone(), k.unsigned_abs() as usize);
    // compare |r| against 10^e
    let ge = |e: i64| -> bool {
        if e >= 0 {
            n >= &d * pow(e)
        } else {
            &n * pow(e) >= d
        }
    };
    while !ge(e) {
        e -= 1;
    }
    while ge(e + 1) {
        e += 1;
    }
    e
}

/// Renders `r` in scientific notation with `digits` significant digits,
/// correctly rounded (ties to even): `-1.3333333332822534916e+00`.
pub fn format_sig(r: &BigRational, digits: usize) -> String {
    let digits = digits.max(1);
    if r.is_zero() {
        return format!("{}e+00", format_mantissa(&BigInt::zero(), digits));
    }
    let mut e = decimal_exponent(r);
    let ten = BigInt::from(10);
    let shift = digits as i64 - 1 - e;
    let pow = num_traits::pow(ten.clone(), shift.unsigned_abs() as usize);
    let scaled = if shift >= 0 {
        r.abs() * BigRational::from_integer(pow)
    } else {
        r.abs() / BigRational::from_integer(pow)
    };
    let mut m = round_half_even(&scaled);
    if m == num_traits::pow(ten.clone(), digits) {
        m /= &ten;
        e += 1;
    }
    let sign = if r.is_negative() { "-" } else { "" };
    let esign = if e < 0 { '-' } else { '+' };
    format!(
        "{sign}{}e{esign}{:02}",
        format_mantissa(&m, digits),
        e.abs()
    )
}

fn format_mantissa(m: &BigInt, digits: usize) -> String {
    let s = format!("{:0>width$}", m.to_string(), width = digits);
    if digits == 1 {
        s
    } else {
        format!("{}.{}", &s[..1], &s[1..])
    }
}

/// Nearest integer to a nonnegative rational, ties to even.
fn round_half_even(r: &BigRational) -> BigInt {
    let (q, rem): (BigInt, BigInt) = r.numer().div_rem(r.denom());
    let twice: BigInt = rem * 2;
    match twice.cmp(r.denom()) {
        std::cmp::Ordering::Less => q,
        std::cmp::Ordering::Greater => q + 1,
        std::cmp::Ordering::Equal => {
            if q.is_even() {
                q
            } else {
                q + 1
            }
        }
    }
}

/// Significand of `|r|` scaled into `[1, 10)`, exactly.
pub fn significand(r: &BigRational) -> BigRational {
    if r.is_zero() {
        return BigRational::zero();
    }
    let e = decimal_exponent(r);
    let pow =
        BigRational::from_integer(num_traits::pow(BigInt::from(10), e.unsigned_abs() as usize));
    if e >= 0 {
        r.abs() / pow
    } else {
        r.abs() * pow
    }
}

/// Number of leading significant decimal digits on which `x` and `y` agree,
/// measured as `-log10(|x - y| / |y|)`; capped at 40.
pub fn agreeing_digits(x: &BigRational, y: &BigRational) -> f64 {
    if x == y {
        return 40.0;
    }
    if y.is_zero() {
        return 0.0;
    }
    let rel = ((x - y) / y).abs();
    let v = ratio_to_f64(&rel);
    if v <= 0.0 {
        40.0
    } else {
        (-v.log10()).clamp(0.0, 40.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn sig_formatting() {
        assert_eq!(format_sig(&q(1, 12), 3), "8.33e-02");
        assert_eq!(format_sig(&q(-5, 4), 4), "-1.250e+00");
        assert_eq!(format_sig(&q(0, 1), 3), "0.00e+00");
        assert_eq!(format_sig(&q(999, 1), 2), "1.0e+03");
        assert_eq!(format_sig(&q(25, 1000), 1), "2e-02");
        assert_eq!(format_sig(&q(35, 1000), 1), "4e-02");
        assert_eq!(format_sig(&q(-1, 192), 2), "-5.2e-03");
    }

    #[test]
    fn ratio_text_round_trip() {
        assert_eq!(parse_ratio("-2/4").unwrap(), q(-1, 2));
        assert_eq!(parse_ratio("7").unwrap(), q(7, 1));
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("x").is_err());
        assert_eq!(format_ratio(&q(3, 1)), "3/1");
    }

    #[test]
    fn decimal_literals() {
        assert_eq!(parse_decimal("1.5").unwrap(), q(3, 2));
        assert_eq!(parse_decimal("-0.125").unwrap(), q(-1, 8));
        assert_eq!(parse_decimal("2.5e2").unwrap(), q(250, 1));
        assert_eq!(parse_decimal("15e-1").unwrap(), q(3, 2));
        assert!(parse_decimal("1.2.3").is_err());
        assert!(parse_decimal("pi").is_err());
        assert!(parse_decimal(".").is_err());
    }

    #[test]
    fn float_round_trip_is_exact_for_dyadics() {
        let r = q(-3, 8);
        let f = float_from_ratio(&r, 64);
        assert_eq!(float_to_ratio(&f), r);
    }

    #[test]
    fn float_rounding_is_within_half_ulp() {
        let r = q(1, 3);
        let f = float_from_ratio(&r, 64);
        let err = (float_to_ratio(&f) - &r).abs();
        // |1/3| in [2^-2, 2^-1): ulp = 2^(-2-63)
        let half_ulp = BigRational::new(BigInt::one(), BigInt::one() << 66);
        assert!(err <= half_ulp);
    }

    #[test]
    fn precision_from_digits() {
        assert_eq!(
            NumericMode::from_digits(20).unwrap(),
            NumericMode::Float { bits: 67 }
        );
        assert_eq!(
            NumericMode::from_digits(5).unwrap(),
            NumericMode::Float { bits: 53 }
        );
        assert!(NumericMode::float(52).is_err());
    }

    #[test]
    fn significand_of_small_value() {
        let r = q(-27, 10_000);
        assert_eq!(significand(&r), q(27, 10));
    }
}
