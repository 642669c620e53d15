//! The space of rational functions on a poset, over the delta basis.
//!
//! A vector assigns a rational to every element; coordinate `p` is the value
//! at `delta_p`. Matrices act on these vectors and are indexed by element
//! index, so `zeta[(p, q)] = 1` iff `p <= q`. Everything here is exact.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Index;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::lattice::Poset;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("not a bijection on 0..{n}: {detail}")]
    NotABijection { n: usize, detail: &'static str },
    #[error("internal error: moebius * zeta is not the identity")]
    InversionCheckFailed,
}

fn check_dim(expected: usize, found: usize) -> Result<(), AlgebraError> {
    if expected == found {
        Ok(())
    } else {
        Err(AlgebraError::DimensionMismatch { expected, found })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalVector(Vec<Rational>);

impl RationalVector {
    pub fn new(coords: Vec<Rational>) -> Self {
        RationalVector(coords)
    }

    pub fn zeros(n: usize) -> Self {
        RationalVector(vec![Rational::zero(); n])
    }

    pub fn delta(n: usize, p: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[p] = Rational::one();
        v
    }

    /// The unit of the pointwise algebra, the sum of all deltas.
    pub fn unit(n: usize) -> Self {
        RationalVector(vec![Rational::one(); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<Rational> {
        self.0
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        check_dim(self.len(), other.len())?;
        Ok(RationalVector(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    /// Nonzero coordinates in index order.
    pub fn support(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.0.iter().enumerate().filter(|(_, v)| !v.is_zero())
    }
}

impl Index<usize> for RationalVector {
    type Output = Rational;

    fn index(&self, p: usize) -> &Rational {
        &self.0[p]
    }
}

/// Dense square matrix of rationals, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    n: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(n: usize) -> Self {
        RationalMatrix {
            n,
            entries: vec![Rational::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.entries[i * n + i] = Rational::one();
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                entries.push(f(r, c));
            }
        }
        RationalMatrix { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> &Rational {
        &self.entries[row * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Rational) {
        self.entries[row * self.n + col] = value;
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |r, c| self.get(c, r).clone())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        check_dim(self.n, other.n)?;
        let n = self.n;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        out.entries[r * n + c] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &RationalVector) -> Result<RationalVector, AlgebraError> {
        check_dim(self.n, v.len())?;
        let n = self.n;
        let coords = (0..n)
            .map(|r| {
                (0..n)
                    .filter(|&c| !self.get(r, c).is_zero() && !v[c].is_zero())
                    .map(|c| self.get(r, c) * &v[c])
                    .fold(Rational::zero(), |acc, x| acc + x)
            })
            .collect();
        Ok(RationalVector(coords))
    }

    pub fn trace(&self) -> Rational {
        (0..self.n).fold(Rational::zero(), |acc, i| acc + self.get(i, i))
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|e| e.is_integer())
    }

    /// Rows and columns permuted so that position `k` holds element `order[k]`.
    pub fn reindexed(&self, order: &[usize]) -> Self {
        Self::from_fn(self.n, |r, c| self.get(order[r], order[c]).clone())
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.n).all(|r| (0..r).all(|c| self.get(r, c).is_zero()))
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Rational]> {
        self.entries.chunks(self.n.max(1)).take(self.n)
    }
}

/// Zeta matrix of a poset and its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZetaMoebiusPair {
    pub zeta: RationalMatrix,
    pub moebius: RationalMatrix,
}

impl ZetaMoebiusPair {
    pub fn new(poset: &Poset) -> Result<Self, AlgebraError> {
        Ok(ZetaMoebiusPair {
            zeta: zeta_matrix(poset),
            moebius: moebius_matrix(poset)?,
        })
    }

    /// Pair of the order dual: both matrices transposed.
    pub fn dual(&self) -> Self {
        ZetaMoebiusPair {
            zeta: self.zeta.transpose(),
            moebius: self.moebius.transpose(),
        }
    }

    /// `mu((zeta f) . (zeta g))`.
    pub fn meet(&self, f: &RationalVector, g: &RationalVector) -> Result<RationalVector, AlgebraError> {
        let lowered = pointwise_product(&self.zeta.apply(f)?, &self.zeta.apply(g)?)?;
        self.moebius.apply(&lowered)
    }
}

pub fn zeta_matrix(poset: &Poset) -> RationalMatrix {
    RationalMatrix::from_fn(poset.len(), |p, q| {
        if poset.leq(p, q) {
            Rational::one()
        } else {
            Rational::zero()
        }
    })
}

/// Moebius function by the recursion `mu(p, p) = 1`,
/// `mu(p, q) = -sum_{p <= r < q} mu(p, r)`, walking `q` along the linear
/// extension. The result is checked against `zeta` before it is returned.
pub fn moebius_matrix(poset: &Poset) -> Result<RationalMatrix, AlgebraError> {
    let n = poset.len();
    let mut mu = vec![BigInt::zero(); n * n];
    for p in 0..n {
        mu[p * n + p] = BigInt::one();
        for &q in &poset.extension()[poset.position(p) + 1..] {
            if !poset.leq(p, q) {
                continue;
            }
            let mut sum = BigInt::zero();
            for &r in &poset.extension()[poset.position(p)..poset.position(q)] {
                if poset.leq(p, r) && poset.leq(r, q) {
                    sum += &mu[p * n + r];
                }
            }
            mu[p * n + q] = -sum;
        }
    }
    let moebius = RationalMatrix::from_fn(n, |p, q| Rational::from_integer(mu[p * n + q].clone()));
    let zeta = zeta_matrix(poset);
    if !moebius.mul(&zeta)?.is_identity() || !zeta.mul(&moebius)?.is_identity() {
        return Err(AlgebraError::InversionCheckFailed);
    }
    Ok(moebius)
}

pub fn pointwise_product(f: &RationalVector, g: &RationalVector) -> Result<RationalVector, AlgebraError> {
    check_dim(f.len(), g.len())?;
    Ok(RationalVector(f.0.iter().zip(&g.0).map(|(a, b)| a * b).collect()))
}

/// Matrix of `delta_p -> delta_{sigma(p)}`: entry `(sigma(p), p)` is one.
pub fn lift_permutation(sigma: &[usize]) -> Result<RationalMatrix, AlgebraError> {
    let n = sigma.len();
    let mut hit = vec![false; n];
    for &image in sigma {
        if image >= n {
            return Err(AlgebraError::NotABijection {
                n,
                detail: "image out of range",
            });
        }
        if core::mem::replace(&mut hit[image], true) {
            return Err(AlgebraError::NotABijection {
                n,
                detail: "repeated image",
            });
        }
    }
    let mut m = RationalMatrix::zeros(n);
    for (p, &q) in sigma.iter().enumerate() {
        m.set(q, p, Rational::one());
    }
    Ok(m)
}

fn weighted_sum(weights: &[u64], m: &RationalMatrix) -> Rational {
    let n = m.dim();
    let mut total = Rational::zero();
    for p in 0..n {
        for q in 0..n {
            let entry = m.get(p, q);
            if !entry.is_zero() {
                total += entry * Rational::from_integer(BigInt::from(weights[p * n + q]));
            }
        }
    }
    total
}

/// `trace(zeta^T zeta M)`, evaluated as the sum over `(p, q)` of
/// `M[p][q]` times the number of common lower bounds of `p` and `q`.
pub fn disjointness_trace(poset: &Poset, m: &RationalMatrix) -> Result<Rational, AlgebraError> {
    check_dim(poset.len(), m.dim())?;
    Ok(weighted_sum(&poset.common_lower_counts(), m))
}

/// `trace(zeta zeta^T M)`: the same with common upper bounds.
pub fn conjointness_trace(poset: &Poset, m: &RationalMatrix) -> Result<Rational, AlgebraError> {
    check_dim(poset.len(), m.dim())?;
    Ok(weighted_sum(&poset.common_upper_counts(), m))
}

/// Linearized meet `mu((zeta f) . (zeta g))`. Defined on any poset; on a
/// lattice it sends `delta_p, delta_q` to `delta_{p meet q}`.
pub fn linearized_meet(poset: &Poset, f: &RationalVector, g: &RationalVector) -> Result<RationalVector, AlgebraError> {
    check_dim(poset.len(), f.len())?;
    ZetaMoebiusPair::new(poset)?.meet(f, g)
}

/// Linearized meet of the order dual.
pub fn linearized_join(poset: &Poset, f: &RationalVector, g: &RationalVector) -> Result<RationalVector, AlgebraError> {
    linearized_meet(&poset.dual(), f, g)
}
