//! Linear-time Bézout identity `L1·T_a + L2·T_b = 1` for Chebyshev
//! polynomials, computed directly in the cosh basis, plus an extended-Euclid
//! oracle in the monomial basis.
//!
//! The construction walks the even frequencies `k` in `[0, a+b-1]`. After
//! step `i` the accumulated sum `Σ c_j cosh(f_j x) cosh(α_j x)` equals
//! `1 + d_i cosh(k_i x)`; each step cancels the remainder term using one of
//! the product rules
//!
//! * `k -> |2a - k|` with `f = |a - k|` on the `a` side,
//! * `k -> 2b - k` with `f = |b - k|` on the `b` side (when `k >= b-a+1`),
//! * `k -> 2a + k` with `f = a + k` on the `a` side (when `k <= b-a-1`),
//!
//! choosing the image that is not the previous frequency. The walk stops on
//! the fixed point `k = a` (a even) or `k = b` (b even), where a constant
//! multiple of `cosh(ax)` or `cosh(bx)` clears the remainder.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::coshbasis::{chebyshev_t, cosh_mul, CoshPoly, MonomialPoly};
use crate::error::{Error, Result};

/// A validated pair of coprime lengths, not both odd, stored with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct BezoutProblem {
    a: u64,
    b: u64,
    /// The caller passed the larger length first.
    swapped: bool,
}

impl BezoutProblem {
    pub fn new(a: u64, b: u64) -> Result<Self> {
        if a == 0 || b == 0 {
            return Err(Error::InvalidInput(format!(
                "lengths must be positive, got ({a}, {b})"
            )));
        }
        let g = a.gcd(&b);
        if g > 1 {
            return Err(Error::CommonFactor(g));
        }
        if a % 2 == 1 && b % 2 == 1 {
            return Err(Error::BothOdd(a, b));
        }
        let swapped = a > b;
        let (a, b) = if swapped { (b, a) } else { (a, b) };
        Ok(Self { a, b, swapped })
    }

    /// The shorter length.
    pub fn a(&self) -> u64 {
        self.a
    }

    /// The longer length.
    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn swapped(&self) -> bool {
        self.swapped
    }

    /// Number of steps of the walk, `(a+b+1)/2`.
    pub fn step_count(&self) -> usize {
        ((self.a + self.b + 1) / 2) as usize
    }

    /// The side whose length is even; it receives the final constant term.
    pub fn even_side(&self) -> Side {
        if self.a % 2 == 0 {
            Side::A
        } else {
            Side::B
        }
    }

    /// The stationary frequency that ends the walk.
    pub fn final_frequency(&self) -> u64 {
        match self.even_side() {
            Side::A => self.a,
            Side::B => self.b,
        }
    }
}

/// Which operator a step multiplies: `cosh(ax)` (feeding `L1`) or `cosh(bx)` (feeding `L2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    A,
    B,
}

/// One step: contributes `c · cosh(f x)` to `L1` (side A) or `L2` (side B),
/// leaving the remainder `d · cosh(k x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct BezoutStep {
    #[serde(rename = "i")]
    pub index: usize,
    pub alpha: Side,
    pub k: u64,
    pub f: u64,
    pub c: i8,
    pub d: i8,
}

impl BezoutStep {
    /// `c · cosh(f x) · cosh(α x)` expanded in the cosh basis.
    pub fn contribution(&self, problem: &BezoutProblem) -> CoshPoly {
        let alpha = match self.alpha {
            Side::A => problem.a,
            Side::B => problem.b,
        };
        cosh_mul(
            &CoshPoly::from_int_terms([(self.f, i64::from(self.c))]),
            &CoshPoly::from_int_terms([(alpha, 1)]),
        )
    }

    pub fn is_final(&self) -> bool {
        self.d == 0
    }
}

/// Iterator over the steps of the walk; O(1) work per step.
#[derive(Debug, Clone)]
pub struct BezoutWalk {
    a: i64,
    b: i64,
    k_final: i64,
    k_prev: i64,
    k: i64,
    c: i8,
    index: usize,
    finished: bool,
}

impl BezoutWalk {
    pub fn new(problem: &BezoutProblem) -> Self {
        Self {
            a: problem.a as i64,
            b: problem.b as i64,
            k_final: problem.final_frequency() as i64,
            k_prev: 0,
            k: 0,
            c: 0,
            index: 0,
            finished: false,
        }
    }
}

impl Iterator for BezoutWalk {
    type Item = BezoutStep;

    fn next(&mut self) -> Option<BezoutStep> {
        if self.finished {
            return None;
        }
        let (a, b) = (self.a, self.b);
        self.index += 1;
        if self.index == 1 {
            // 2cosh²(ax) = 1 + cosh(2ax): the only product with a constant term in range.
            self.k = 2 * a;
            self.c = 2;
            return Some(BezoutStep {
                index: 1,
                alpha: Side::A,
                k: self.k as u64,
                f: a as u64,
                c: 2,
                d: 1,
            });
        }
        if self.k == self.k_final {
            self.finished = true;
            let alpha = if self.k_final == a { Side::A } else { Side::B };
            return Some(BezoutStep {
                index: self.index,
                alpha,
                k: self.k as u64,
                f: 0,
                c: -self.c / 2,
                d: 0,
            });
        }
        let k = self.k;
        let reflect_a = (Side::A, (2 * a - k).abs(), (a - k).abs());
        let other = if k > b - a {
            (Side::B, 2 * b - k, (b - k).abs())
        } else {
            (Side::A, 2 * a + k, a + k)
        };
        let (alpha, k_next, f) = if reflect_a.1 != self.k_prev {
            debug_assert_eq!(
                other.1, self.k_prev,
                "walk left its two-candidate structure"
            );
            reflect_a
        } else {
            other
        };
        self.c = -self.c;
        self.k_prev = k;
        self.k = k_next;
        Some(BezoutStep {
            index: self.index,
            alpha,
            k: k_next as u64,
            f: f as u64,
            c: self.c,
            d: self.c / 2,
        })
    }
}

/// Cofactor coefficients as dense integer arrays indexed by frequency:
/// `l1` has length `b`, `l2` has length `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BezoutArrays {
    pub problem: BezoutProblem,
    pub l1: Vec<i64>,
    pub l2: Vec<i64>,
}

impl BezoutArrays {
    pub fn to_pair(&self) -> BezoutPair {
        let convert = |v: &[i64]| {
            CoshPoly::from_int_terms(
                v.iter()
                    .enumerate()
                    .filter(|(_, c)| **c != 0)
                    .map(|(k, c)| (k as u64, *c)),
            )
        };
        BezoutPair {
            problem: self.problem,
            l1: convert(&self.l1),
            l2: convert(&self.l2),
        }
    }
}

/// Runs the walk and accumulates the cofactor arrays without recording a trace.
pub fn bezout_arrays(a: u64, b: u64) -> Result<BezoutArrays> {
    let problem = BezoutProblem::new(a, b)?;
    let mut l1 = vec![0i64; problem.b as usize];
    let mut l2 = vec![0i64; problem.a as usize];
    for step in BezoutWalk::new(&problem) {
        let slot = match step.alpha {
            Side::A => &mut l1[step.f as usize],
            Side::B => &mut l2[step.f as usize],
        };
        *slot += i64::from(step.c);
    }
    Ok(BezoutArrays { problem, l1, l2 })
}

/// Cofactors with `L1·cosh(ax) + L2·cosh(bx) = 1`, `a < b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BezoutPair {
    pub problem: BezoutProblem,
    #[serde(rename = "L1")]
    pub l1: CoshPoly,
    #[serde(rename = "L2")]
    pub l2: CoshPoly,
}

impl fmt::Display for BezoutPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({})·cosh({}x) + ({})·cosh({}x) = 1",
            self.l1, self.problem.a, self.l2, self.problem.b
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BezoutTrace {
    pub steps: Vec<BezoutStep>,
}

impl BezoutTrace {
    /// `k_0 = 0` followed by the remainder frequencies of every non-final step.
    pub fn k_sequence(&self) -> Vec<u64> {
        std::iter::once(0)
            .chain(self.steps.iter().filter(|s| !s.is_final()).map(|s| s.k))
            .collect()
    }

    /// Running sums `Σ_{i <= i0} c_i cosh(f_i x) cosh(α_i x)` for each `i0`,
    /// built incrementally.
    pub fn partial_sums<'a>(
        &'a self,
        problem: &'a BezoutProblem,
    ) -> impl Iterator<Item = CoshPoly> + 'a {
        let mut acc = CoshPoly::zero();
        self.steps.iter().map(move |step| {
            acc = &acc + &step.contribution(problem);
            acc.clone()
        })
    }
}

/// Computes the cofactors and the step trace.
pub fn bezout_cosh(a: u64, b: u64) -> Result<(BezoutPair, BezoutTrace)> {
    let problem = BezoutProblem::new(a, b)?;
    let steps: Vec<BezoutStep> = BezoutWalk::new(&problem).collect();
    debug_assert_eq!(steps.len(), problem.step_count());
    let mut l1 = CoshPoly::zero();
    let mut l2 = CoshPoly::zero();
    for step in &steps {
        let c = BigRational::from_integer(BigInt::from(step.c));
        match step.alpha {
            Side::A => l1.add_term(step.f, c),
            Side::B => l2.add_term(step.f, c),
        }
    }
    Ok((BezoutPair { problem, l1, l2 }, BezoutTrace { steps }))
}

/// `L1·cosh(ax) + L2·cosh(bx) - 1`; zero iff the identity holds.
pub fn verify_identity(pair: &BezoutPair) -> CoshPoly {
    let a = CoshPoly::from_int_terms([(pair.problem.a, 1)]);
    let b = CoshPoly::from_int_terms([(pair.problem.b, 1)]);
    let lhs = &cosh_mul(&pair.l1, &a) + &cosh_mul(&pair.l2, &b);
    &lhs - &CoshPoly::one()
}

/// Extended Euclid on `T_a`, `T_b` over the rationals.
///
/// Returns `(g, u, v)` with `u·T_a + v·T_b = g` and `g` monic. When `g = 1`
/// the cofactors are the unique ones with `deg u < b`, `deg v < a`.
pub fn gcd_oracle(a: u64, b: u64) -> (MonomialPoly, MonomialPoly, MonomialPoly) {
    let (mut r0, mut r1) = (chebyshev_t(a), chebyshev_t(b));
    let (mut s0, mut s1) = (MonomialPoly::one(), MonomialPoly::zero());
    let (mut t0, mut t1) = (MonomialPoly::zero(), MonomialPoly::one());
    while !r1.is_zero() {
        let (quot, rem) = r0.div_rem(&r1);
        let s2 = &s0 - &(&quot * &s1);
        let t2 = &t0 - &(&quot * &t1);
        r0 = std::mem::replace(&mut r1, rem);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    let inv = r0
        .leading()
        .map(|lc| lc.recip())
        .unwrap_or_else(BigRational::one);
    debug_assert!(!inv.is_zero());
    (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
}
