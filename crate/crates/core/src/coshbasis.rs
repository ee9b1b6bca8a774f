//! Polynomials in the cosh basis `Σ c_k cosh(kx)` and in the monomial basis in
//! `c = cosh x`, with exact rational coefficients.
//!
//! The two bases are related by `cosh(kx) = T_k(cosh x)`. Products in the cosh
//! basis close under `2 cosh(ix) cosh(jx) = cosh((i+j)x) + cosh(|i-j|x)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::numeric::{format_ratio, parse_ratio};

/// `Σ c_k cosh(kx)`, stored sparsely. Zero coefficients are never stored, so
/// the zero polynomial is the empty map.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct CoshPoly {
    terms: BTreeMap<u64, BigRational>,
}

impl CoshPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::term(0, BigRational::one())
    }

    /// The single term `coeff · cosh(freq x)`.
    pub fn term(freq: u64, coeff: BigRational) -> Self {
        let mut p = Self::zero();
        p.add_term(freq, coeff);
        p
    }

    /// Builds a polynomial from `(frequency, coefficient)` pairs; repeated
    /// frequencies are summed.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (u64, BigRational)>,
    {
        let mut p = Self::zero();
        for (k, c) in terms {
            p.add_term(k, c);
        }
        p
    }

    /// Integer-coefficient convenience constructor.
    pub fn from_int_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (u64, i64)>,
    {
        Self::from_terms(
            terms
                .into_iter()
                .map(|(k, c)| (k, BigRational::from_integer(BigInt::from(c)))),
        )
    }

    /// Adds `coeff · cosh(freq x)` in place, dropping the entry if it cancels.
    pub fn add_term(&mut self, freq: u64, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(freq) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                *slot.get_mut() += coeff;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `cosh(freq x)` (zero when absent).
    pub fn coeff(&self, freq: u64) -> BigRational {
        self.terms
            .get(&freq)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Terms in increasing frequency order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (u64, &BigRational)> + '_ {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn max_frequency(&self) -> Option<u64> {
        self.terms.keys().next_back().copied()
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        if factor.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(k, c)| (*k, c * factor)).collect(),
        }
    }

    /// Value at `x` in double precision.
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.terms
            .iter()
            .map(|(k, c)| crate::numeric::ratio_to_f64(c) * (*k as f64 * x).cosh())
            .sum()
    }
}

/// Product in the cosh basis via `2cosh(ix)cosh(jx) = cosh((i+j)x) + cosh(|i-j|x)`.
pub fn cosh_mul(p: &CoshPoly, q: &CoshPoly) -> CoshPoly {
    let two = BigRational::from_integer(BigInt::from(2));
    let mut out = CoshPoly::zero();
    for (i, ci) in p.terms() {
        for (j, cj) in q.terms() {
            let half = (ci * cj) / &two;
            out.add_term(i + j, half.clone());
            out.add_term(i.abs_diff(j), half);
        }
    }
    out
}

impl Add for &CoshPoly {
    type Output = CoshPoly;
    fn add(self, rhs: &CoshPoly) -> CoshPoly {
        let mut out = self.clone();
        for (k, c) in rhs.terms() {
            out.add_term(k, c.clone());
        }
        out
    }
}

impl Sub for &CoshPoly {
    type Output = CoshPoly;
    fn sub(self, rhs: &CoshPoly) -> CoshPoly {
        let mut out = self.clone();
        for (k, c) in rhs.terms() {
            out.add_term(k, -c.clone());
        }
        out
    }
}

impl Neg for &CoshPoly {
    type Output = CoshPoly;
    fn neg(self) -> CoshPoly {
        CoshPoly {
            terms: self.terms.iter().map(|(k, c)| (*k, -c.clone())).collect(),
        }
    }
}

impl Mul for &CoshPoly {
    type Output = CoshPoly;
    fn mul(self, rhs: &CoshPoly) -> CoshPoly {
        cosh_mul(self, rhs)
    }
}

impl fmt::Display for CoshPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (n, (k, c)) in self.terms.iter().rev().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if n == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mag = c.abs();
            let arg = if *k == 1 {
                "x".to_string()
            } else {
                format!("{k}x")
            };
            if *k == 0 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "cosh({arg})")?;
            } else {
                write!(f, "{mag}*cosh({arg})")?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct CoshPolyWire {
    terms: Vec<(u64, String)>,
}

impl Serialize for CoshPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        CoshPolyWire {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (*k, format_ratio(c)))
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CoshPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = CoshPolyWire::deserialize(deserializer)?;
        let mut terms = Vec::with_capacity(wire.terms.len());
        for (k, s) in wire.terms {
            let c = parse_ratio(&s).map_err(de::Error::custom)?;
            terms.push((k, c));
        }
        Ok(CoshPoly::from_terms(terms))
    }
}

/// Dense polynomial in `c` (standing for `cosh x`); index = degree.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct MonomialPoly {
    coeffs: Vec<BigRational>,
}

impl MonomialPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The polynomial `c`.
    pub fn x() -> Self {
        Self::from_coeffs(vec![BigRational::zero(), BigRational::one()])
    }

    /// Builds from coefficients in increasing degree order, trimming trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_int_coeffs(coeffs: &[i64]) -> Self {
        Self::from_coeffs(
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, deg: usize) -> BigRational {
        self.coeffs
            .get(deg)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// Same polynomial scaled to leading coefficient 1 (zero stays zero).
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(lc) => {
                let inv = lc.recip();
                self.scale(&inv)
            }
        }
    }

    /// Multiplication by `c`.
    pub fn shift(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(BigRational::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    /// Euclidean division: returns `(quotient, remainder)` with `deg r < deg d`.
    ///
    /// Panics if `divisor` is zero.
    pub fn div_rem(&self, divisor: &MonomialPoly) -> (MonomialPoly, MonomialPoly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lc_inv = divisor.coeffs[dd].recip();
        let mut rem = self.coeffs.clone();
        let Some(nd) = self.degree() else {
            return (Self::zero(), Self::zero());
        };
        if nd < dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); nd - dd + 1];
        for shift in (0..=nd - dd).rev() {
            let lead = &rem[shift + dd];
            if lead.is_zero() {
                continue;
            }
            let factor = lead * &lc_inv;
            for (i, dc) in divisor.coeffs.iter().enumerate() {
                rem[shift + i] -= &factor * dc;
            }
            quot[shift] = factor;
        }
        rem.truncate(dd);
        (Self::from_coeffs(quot), Self::from_coeffs(rem))
    }

    pub fn eval(&self, c: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for coeff in self.coeffs.iter().rev() {
            acc = acc * c + coeff;
        }
        acc
    }
}

impl Add for &MonomialPoly {
    type Output = MonomialPoly;
    fn add(self, rhs: &MonomialPoly) -> MonomialPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        MonomialPoly::from_coeffs((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &MonomialPoly {
    type Output = MonomialPoly;
    fn sub(self, rhs: &MonomialPoly) -> MonomialPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        MonomialPoly::from_coeffs((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for &MonomialPoly {
    type Output = MonomialPoly;
    fn neg(self) -> MonomialPoly {
        MonomialPoly {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }
}

impl Mul for &MonomialPoly {
    type Output = MonomialPoly;
    fn mul(self, rhs: &MonomialPoly) -> MonomialPoly {
        if self.is_zero() || rhs.is_zero() {
            return MonomialPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        MonomialPoly::from_coeffs(out)
    }
}

impl fmt::Display for MonomialPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            }
            let mag = c.abs();
            match (d, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "c")?,
                (1, false) => write!(f, "{mag}*c")?,
                (_, true) => write!(f, "c^{d}")?,
                (_, false) => write!(f, "{mag}*c^{d}")?,
            }
        }
        Ok(())
    }
}

/// Chebyshev polynomial `T_n` from `T_0 = 1`, `T_1 = c`, `T_{n+1} = 2c T_n - T_{n-1}`.
pub fn chebyshev_t(n: u64) -> MonomialPoly {
    ChebyshevIter::new()
        .nth(n as usize)
        .expect("unbounded iterator")
}

/// Yields `T_0, T_1, T_2, ...`.
struct ChebyshevIter {
    prev: Option<MonomialPoly>,
    cur: MonomialPoly,
}

impl ChebyshevIter {
    fn new() -> Self {
        Self {
            prev: None,
            cur: MonomialPoly::one(),
        }
    }
}

impl Iterator for ChebyshevIter {
    type Item = MonomialPoly;

    fn next(&mut self) -> Option<MonomialPoly> {
        let next = match &self.prev {
            None => MonomialPoly::x(),
            Some(prev) => {
                let two = BigRational::from_integer(BigInt::from(2));
                &self.cur.shift().scale(&two) - prev
            }
        };
        let prev = std::mem::replace(&mut self.cur, next);
        self.prev = Some(prev.clone());
        Some(prev)
    }
}

/// `Σ_k c_k T_k(c)`.
pub fn to_monomial(p: &CoshPoly) -> MonomialPoly {
    let Some(max) = p.max_frequency() else {
        return MonomialPoly::zero();
    };
    let mut acc = MonomialPoly::zero();
    for (k, t_k) in ChebyshevIter::new().take(max as usize + 1).enumerate() {
        let c = p.coeff(k as u64);
        if !c.is_zero() {
            acc = &acc + &t_k.scale(&c);
        }
    }
    acc
}

/// Inverse basis change, by Horner's rule with `c·cosh(kx)` expanded in the cosh basis.
pub fn from_monomial(m: &MonomialPoly) -> CoshPoly {
    let c = CoshPoly::term(1, BigRational::one());
    let mut acc = CoshPoly::zero();
    for coeff in m.coeffs().iter().rev() {
        acc = cosh_mul(&acc, &c);
        acc.add_term(0, coeff.clone());
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn cosh_squared() {
        let c1 = CoshPoly::from_int_terms([(1, 1)]);
        let p = cosh_mul(&c1, &c1);
        assert_eq!(p, CoshPoly::from_terms([(0, q(1, 2)), (2, q(1, 2))]));
    }

    #[test]
    fn constant_is_identity() {
        let p = CoshPoly::from_terms([(7, q(-3, 5))]);
        assert_eq!(cosh_mul(&CoshPoly::one(), &p), p);
    }

    #[test]
    fn product_rule_example() {
        let p = CoshPoly::from_int_terms([(2, 2), (0, 1)]);
        let r = cosh_mul(&p, &CoshPoly::from_int_terms([(2, 1)]));
        assert_eq!(r, CoshPoly::from_int_terms([(0, 1), (2, 1), (4, 1)]));
    }

    #[test]
    fn zero_terms_are_dropped() {
        let mut p = CoshPoly::from_int_terms([(3, 2)]);
        p.add_term(3, q(-2, 1));
        assert!(p.is_zero());
        assert_eq!(CoshPoly::from_int_terms([(4, 0)]), CoshPoly::zero());
    }

    #[test]
    fn small_chebyshev() {
        assert_eq!(chebyshev_t(0), MonomialPoly::one());
        assert_eq!(chebyshev_t(1), MonomialPoly::x());
        assert_eq!(chebyshev_t(2), MonomialPoly::from_int_coeffs(&[-1, 0, 2]));
        assert_eq!(
            chebyshev_t(3),
            MonomialPoly::from_int_coeffs(&[0, -3, 0, 4])
        );
    }

    #[test]
    fn chebyshev_leading_coefficient() {
        for a in 1..=40u64 {
            let t = chebyshev_t(a);
            assert_eq!(t.degree(), Some(a as usize));
            let expected = BigRational::from_integer(BigInt::from(2).pow(a as u32 - 1));
            assert_eq!(t.leading(), Some(&expected));
        }
    }

    #[test]
    fn basis_change_examples() {
        assert_eq!(
            to_monomial(&CoshPoly::from_int_terms([(2, 1)])),
            MonomialPoly::from_int_coeffs(&[-1, 0, 2])
        );
        assert_eq!(to_monomial(&CoshPoly::one()), MonomialPoly::one());
        assert_eq!(
            to_monomial(&CoshPoly::from_int_terms([(2, 2), (0, 1)])),
            MonomialPoly::from_int_coeffs(&[-1, 0, 4])
        );
        assert_eq!(to_monomial(&CoshPoly::zero()), MonomialPoly::zero());
    }

    #[test]
    fn basis_change_of_single_frequency_is_chebyshev() {
        let all: Vec<_> = ChebyshevIter::new().take(201).collect();
        for (n, t) in all.iter().enumerate() {
            let p = CoshPoly::from_int_terms([(n as u64, 1)]);
            assert_eq!(&to_monomial(&p), t, "n = {n}");
        }
    }

    #[test]
    fn from_monomial_inverts() {
        let p = CoshPoly::from_terms([(0, q(1, 3)), (3, q(-2, 1)), (6, q(5, 7))]);
        assert_eq!(from_monomial(&to_monomial(&p)), p);
    }

    #[test]
    fn div_rem_reconstructs() {
        let t5 = chebyshev_t(5);
        let t3 = chebyshev_t(3);
        let (quot, rem) = t5.div_rem(&t3);
        assert!(rem.degree().unwrap_or(0) < 3);
        assert_eq!(&(&quot * &t3) + &rem, t5);
    }

    #[test]
    fn json_wire_format() {
        let p = CoshPoly::from_terms([(2, q(2, 1)), (0, q(1, 2))]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"terms":[[0,"1/2"],[2,"2/1"]]}"#);
        let back: CoshPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        let plain: CoshPoly = serde_json::from_str(r#"{"terms":[[1,"-2"]]}"#).unwrap();
        assert_eq!(plain, CoshPoly::from_int_terms([(1, -2)]));
    }

    #[test]
    fn display() {
        let p = CoshPoly::from_int_terms([(2, 2), (0, 1)]);
        assert_eq!(p.to_string(), "2*cosh(2x) + 1");
        assert_eq!(
            CoshPoly::from_int_terms([(1, -2)]).to_string(),
            "-2*cosh(x)"
        );
        assert_eq!(chebyshev_t(3).to_string(), "4*c^3 - 3*c");
    }
}
