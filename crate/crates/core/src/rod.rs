//! Discretized heated rod: exact state-space model, flat-output checks,
//! the Krylov-space walk and the paper-tape folding process.
//!
//! Nodes `0..=N` with `N = q(a+b)` sit on a rod of length `a+b`; node
//! `h = qa` is the heated point whose temperature is the input `u`. Both ends
//! are insulated (`θ_{-1} = θ_1`, `θ_{N+1} = θ_{N-1}`).

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::bezout::{BezoutPair, BezoutProblem};
use crate::error::{Error, Result};

/// Which interior stencil the model encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StencilSign {
    /// `θ_i' = q²(θ_{i-1} - 2θ_i + θ_{i+1})`, the dissipative heat equation.
    Laplacian,
    /// `θ_i' = 2θ_i - θ_{i-1} - θ_{i+1}`, sign-flipped and unscaled.
    Paper,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RodModel {
    pub a: u64,
    pub b: u64,
    pub q: u64,
    pub sign: StencilSign,
    /// Number of intervals `q(a+b)`.
    pub intervals: usize,
    pub heated: usize,
    /// Sparse rows of `A`, `(column, value)` in column order.
    rows: Vec<Vec<(usize, BigRational)>>,
    b_vec: Vec<BigRational>,
}

impl RodModel {
    /// Two-sided rod heated at distance `a` from node 0 and `b` from node `N`.
    pub fn new(a: u64, b: u64, q: u64, sign: StencilSign) -> Result<Self> {
        if a == 0 || b == 0 || q == 0 {
            return Err(Error::InvalidInput(format!(
                "a, b, q must be positive, got ({a}, {b}, {q})"
            )));
        }
        Ok(Self::assemble(a, b, q, sign))
    }

    /// Rod of length `a` heated at its far end (`h = N`), insulated at node 0.
    pub fn one_sided(a: u64, q: u64) -> Result<Self> {
        if a == 0 || q == 0 {
            return Err(Error::InvalidInput(format!(
                "a, q must be positive, got ({a}, {q})"
            )));
        }
        Ok(Self::assemble(a, 0, q, StencilSign::Laplacian))
    }

    fn assemble(a: u64, b: u64, q: u64, sign: StencilSign) -> Self {
        let n_int = (q * (a + b)) as usize;
        let h = (q * a) as usize;
        let (scale, diag) = match sign {
            StencilSign::Laplacian => {
                let q2 = BigInt::from(q * q);
                (
                    BigRational::from_integer(q2.clone()),
                    BigRational::from_integer(-2 * q2),
                )
            }
            StencilSign::Paper => (
                BigRational::from_integer(BigInt::from(-1)),
                BigRational::from_integer(BigInt::from(2)),
            ),
        };
        let index = |node: usize| if node < h { node } else { node - 1 };
        let mut rows = Vec::with_capacity(n_int);
        let mut b_vec = Vec::with_capacity(n_int);
        for node in (0..=n_int).filter(|&i| i != h) {
            let neighbours: [usize; 2] = if node == 0 {
                [1, 1]
            } else if node == n_int {
                [n_int - 1, n_int - 1]
            } else {
                [node - 1, node + 1]
            };
            let mut row: BTreeMap<usize, BigRational> = BTreeMap::new();
            row.insert(index(node), diag.clone());
            let mut bu = BigRational::zero();
            for nb in neighbours {
                if nb == h {
                    bu += &scale;
                } else {
                    *row.entry(index(nb)).or_insert_with(BigRational::zero) += &scale;
                }
            }
            rows.push(row.into_iter().collect());
            b_vec.push(bu);
        }
        Self {
            a,
            b,
            q,
            sign,
            intervals: n_int,
            heated: h,
            rows,
            b_vec,
        }
    }

    /// State dimension `n` (all nodes except the heated one).
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// State index of a node, `None` for the heated node or out of range.
    pub fn state_index(&self, node: usize) -> Option<usize> {
        match node.cmp(&self.heated) {
            std::cmp::Ordering::Less => Some(node),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater if node <= self.intervals => Some(node - 1),
            std::cmp::Ordering::Greater => None,
        }
    }

    pub fn node_of(&self, state: usize) -> usize {
        if state < self.heated {
            state
        } else {
            state + 1
        }
    }

    pub fn b_vector(&self) -> &[BigRational] {
        &self.b_vec
    }

    pub fn a_row(&self, state: usize) -> &[(usize, BigRational)] {
        &self.rows[state]
    }

    pub fn a_dense(&self) -> Vec<Vec<BigRational>> {
        let n = self.dim();
        self.rows
            .iter()
            .map(|row| {
                let mut dense = vec![BigRational::zero(); n];
                for (c, v) in row {
                    dense[*c] = v.clone();
                }
                dense
            })
            .collect()
    }

    /// Same model with `A` multiplied by `factor` (B unchanged).
    pub fn with_a_scaled(&self, factor: &BigRational) -> Self {
        let mut out = self.clone();
        for row in &mut out.rows {
            for (_, v) in row.iter_mut() {
                *v *= factor;
            }
        }
        out
    }

    /// `w·A`.
    pub fn left_mul(&self, w: &[BigRational]) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); self.dim()];
        for (wi, row) in w.iter().zip(&self.rows) {
            if wi.is_zero() {
                continue;
            }
            for (c, v) in row {
                out[*c] += wi * v;
            }
        }
        out
    }

    /// `A·v`.
    pub fn right_mul(&self, v: &[BigRational]) -> Vec<BigRational> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|(c, x)| x * &v[*c]).sum())
            .collect()
    }

    /// `[B, AB, ..., A^{count-1}B]`.
    pub fn krylov_vectors(&self, count: usize) -> Vec<Vec<BigRational>> {
        let mut out = Vec::with_capacity(count);
        let mut v = self.b_vec.clone();
        for _ in 0..count {
            let next = self.right_mul(&v);
            out.push(std::mem::replace(&mut v, next));
        }
        out
    }
}

/// Temperatures weights `w` defining the output `z = Σ w_node θ_node`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FlatOutputVector {
    pub weights: BTreeMap<usize, BigRational>,
}

impl FlatOutputVector {
    pub fn single(node: usize) -> Self {
        let mut weights = BTreeMap::new();
        weights.insert(node, BigRational::one());
        Self { weights }
    }

    pub fn add(&mut self, node: usize, c: &BigRational) {
        let e = self.weights.entry(node).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.weights.remove(&node);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn negate(&self) -> Self {
        Self {
            weights: self.weights.iter().map(|(k, v)| (*k, -v)).collect(),
        }
    }

    /// Dense state-space row vector; `None` if a weight sits on the heated node
    /// or outside the rod.
    pub fn to_state_vector(&self, model: &RodModel) -> Option<Vec<BigRational>> {
        let mut w = vec![BigRational::zero(); model.dim()];
        for (node, c) in &self.weights {
            w[model.state_index(*node)?] += c;
        }
        Some(w)
    }
}

impl fmt::Display for FlatOutputVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.weights.is_empty() {
            return write!(f, "0");
        }
        for (n, (k, v)) in self.weights.iter().enumerate() {
            match (n, v.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mag = v.abs();
            if mag.is_one() {
                write!(f, "theta_{k}")?;
            } else {
                write!(f, "{mag}*theta_{k}")?;
            }
        }
        Ok(())
    }
}

/// How the cofactor frequencies are attached to node indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Pairing {
    /// `Σ c_{2,k} θ_{qk} + Σ c_{1,k} θ_{q(a+b-k)}`.
    Derived,
    /// `Σ c_{1,k} θ_{qk} + Σ c_{2,k} θ_{q(a+b-k)}`.
    Printed,
}

pub fn flat_output_from_bezout(pair: &BezoutPair, q: u64) -> FlatOutputVector {
    flat_output_with_pairing(pair, q, Pairing::Derived)
}

/// Weight vector for either pairing. Under [`Pairing::Printed`] nodes may land
/// on the heated point or past the end; those weights are kept so that
/// [`is_flat_output`] rejects the vector.
pub fn flat_output_with_pairing(pair: &BezoutPair, q: u64, pairing: Pairing) -> FlatOutputVector {
    let (a, b) = (pair.problem.a(), pair.problem.b());
    let (near, far) = match pairing {
        Pairing::Derived => (&pair.l2, &pair.l1),
        Pairing::Printed => (&pair.l1, &pair.l2),
    };
    let mut w = FlatOutputVector::default();
    for (k, c) in near.terms() {
        w.add((q * k) as usize, c);
    }
    for (k, c) in far.terms() {
        if let Some(node) = (a + b).checked_sub(k) {
            w.add((q * node) as usize, c);
        } else {
            w.add(usize::MAX, c);
        }
    }
    w
}

/// `w·A^i·B = 0` for `i <= n-2` and `w·A^{n-1}·B != 0`, in exact arithmetic.
pub fn is_flat_output(model: &RodModel, w: &FlatOutputVector) -> bool {
    if w.is_zero() {
        return false;
    }
    let Some(mut v) = w.to_state_vector(model) else {
        return false;
    };
    let n = model.dim();
    for i in 0..n {
        let d: BigRational = v.iter().zip(model.b_vector()).map(|(x, y)| x * y).sum();
        if i + 1 < n {
            if !d.is_zero() {
                return false;
            }
            v = model.left_mul(&v);
        } else {
            return !d.is_zero();
        }
    }
    false
}

/// Rank of a set of rational vectors, by fraction-free (Bareiss) elimination.
pub fn rank_of(vectors: &[Vec<BigRational>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = vectors.iter().map(|v| integer_row(v)).collect();
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    let mut prev = BigInt::one();
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for r in rank + 1..rows {
            for k in c + 1..cols {
                let t = &m[rank][c] * &m[r][k] - &m[r][c] * &m[rank][k];
                m[r][k] = t / &prev;
            }
            m[r][c] = BigInt::zero();
        }
        prev = m[rank][c].clone();
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

fn integer_row(v: &[BigRational]) -> Vec<BigInt> {
    let den = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    v.iter().map(|x| x.numer() * (&den / x.denom())).collect()
}

/// Rank of `[B, AB, ..., A^{n-1}B]`.
pub fn controllability_rank(model: &RodModel) -> usize {
    rank_of(&model.krylov_vectors(model.dim()))
}

/// One step of the reflection walk. Element `i >= 1` adds the direction
/// `e_{k2} + c1·e_{k1}`; element 0 stands for the control direction itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct GammaElement {
    pub i: usize,
    pub k2: Option<usize>,
    pub k1: Option<usize>,
    pub c1: i8,
}

impl GammaElement {
    /// Direction in state space. End nodes carry weight 2, matching the
    /// doubled coupling of the insulated boundary rows.
    pub fn to_state_vector(&self, model: &RodModel) -> Vec<BigRational> {
        let mut v = vec![BigRational::zero(); model.dim()];
        let weight = |node: usize| {
            if node == 0 || node == model.intervals {
                BigRational::from_integer(2.into())
            } else {
                BigRational::one()
            }
        };
        if let Some(k2) = self.k2 {
            if let Some(s) = model.state_index(k2) {
                v[s] += weight(k2);
            }
        }
        if let Some(k1) = self.k1 {
            if let Some(s) = model.state_index(k1) {
                v[s] += weight(k1) * BigRational::from_integer(self.c1.into());
            }
        }
        v
    }
}

/// Elements `0..=q(a+b)`. The primary index leaves the heated node into the
/// longer side and bounces off its far end; the secondary index runs into the
/// shorter side, bounces off the free end, and flips sign each time it
/// returns to the heated node.
pub fn gamma_sequence(a: u64, b: u64, q: u64) -> Result<Vec<GammaElement>> {
    if a == 0 || b == 0 || q == 0 || a == b {
        return Err(Error::InvalidInput(format!(
            "need positive a != b and q >= 1, got ({a}, {b}, {q})"
        )));
    }
    let h = (q * a) as i64;
    let n_int = (q * (a + b)) as usize;
    let (short, long) = ((q * a.min(b)) as i64, (q * a.max(b)) as i64);
    let dir: i64 = if b > a { 1 } else { -1 };
    let triangle = |i: i64, len: i64| {
        let m = i % (2 * len);
        if m <= len {
            m
        } else {
            2 * len - m
        }
    };
    let mut out = Vec::with_capacity(n_int + 1);
    out.push(GammaElement {
        i: 0,
        k2: None,
        k1: None,
        c1: 0,
    });
    for i in 1..=n_int as i64 {
        let k2 = (h + dir * triangle(i, long)) as usize;
        let (k1, c1) = if i % (2 * short) == 0 {
            (None, 0)
        } else {
            let sign = if (i / (2 * short)) % 2 == 0 { 1 } else { -1 };
            (Some((h - dir * triangle(i, short)) as usize), sign)
        };
        out.push(GammaElement {
            i: i as usize,
            k2: Some(k2),
            k1,
            c1,
        });
    }
    Ok(out)
}

/// Event of the tape-folding simulation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum FoldEvent {
    /// Fold at the heated point: both arms stacked, the `a` arm face down.
    Fold { a: u64, b: u64 },
    /// The stack of length `length` is cut where the overhanging arm passes
    /// its end and the overhang is rotated back onto the stack.
    CutRotate { length: u64, overhang: u64 },
    /// Both ends have equal length; counting happens at offset `end`.
    Done { end: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FoldResult {
    /// Net signed count per border index.
    pub counts: BTreeMap<usize, i64>,
    pub events: Vec<FoldEvent>,
}

impl FoldResult {
    pub fn as_flat_output(&self) -> FlatOutputVector {
        let mut w = FlatOutputVector::default();
        for (k, c) in &self.counts {
            w.add(*k, &BigRational::from_integer((*c).into()));
        }
        w
    }
}

/// Reflect offset `u` into `[0, m]`: past `m` the overhang is rotated back
/// (no face change); below 0 it is folded over (face change).
fn reduce(mut u: i64, m: i64, mut face: i64) -> (i64, i64) {
    while u > m || u < 0 {
        if u > m {
            u = 2 * m - u;
        }
        if u < 0 {
            u = -u;
            face = -face;
        }
    }
    (u, face)
}

/// Simulates folding a tape of `a+b` boxes at the heated border `a`, then
/// cutting and rotating overhangs until the stack ends coincide, and counts
/// the signed border indices that land on the final end. Interior borders
/// carry both adjacent boxes' marks and count twice.
pub fn fold_tape(a: u64, b: u64) -> Result<FoldResult> {
    BezoutProblem::new(a, b)?;
    let (ai, n_int) = (a as i64, (a + b) as i64);
    let mut pos: Vec<(i64, i64)> = (0..=n_int)
        .map(|x| if x < ai { (ai - x, -1) } else { (x - ai, 1) })
        .collect();
    let mut events = vec![FoldEvent::Fold { a, b }];
    let (mut m, mut other) = (a.min(b) as i64, a.max(b) as i64);
    loop {
        for p in pos.iter_mut() {
            *p = reduce(p.0, m, p.1);
        }
        let (next, _) = reduce(other, m, 1);
        events.push(FoldEvent::CutRotate {
            length: m as u64,
            overhang: (other - m) as u64,
        });
        if next == 0 || next == m {
            break;
        }
        other = m;
        m = next;
    }
    events.push(FoldEvent::Done { end: m as u64 });
    let counts = pos
        .iter()
        .enumerate()
        .filter(|(_, (u, _))| *u == m)
        .map(|(x, (_, face))| {
            let mult = if x == 0 || x as i64 == n_int { 1 } else { 2 };
            (x, face * mult)
        })
        .collect();
    Ok(FoldResult { counts, events })
}

/// `w` and `v` agree up to one global sign.
pub fn equal_up_to_sign(w: &FlatOutputVector, v: &FlatOutputVector) -> bool {
    w == v || *w == v.negate()
}

impl RodModel {
    /// `true` where `w·A^i·B` is nonzero, `i = 0..n-1`.
    pub fn output_pattern(&self, w: &FlatOutputVector) -> Option<Vec<bool>> {
        let mut v = w.to_state_vector(self)?;
        let mut out = Vec::with_capacity(self.dim());
        for _ in 0..self.dim() {
            let d: BigRational = v.iter().zip(self.b_vector()).map(|(x, y)| x * y).sum();
            out.push(!d.is_zero());
            v = self.left_mul(&v);
        }
        Some(out)
    }
}
