//! The polytope of precomplements as an explicit exact constraint system.
//!
//! Variables are the entries `x_{pq}` of an `n x n` matrix, numbered
//! row-major in the lattice's linear extension: `x_{pq}` is variable
//! `position(p) * n + position(q)`. Rows come in four families, always in
//! this order:
//!
//! * symmetry, `x_{pq} - x_{qp} = 0` for `position(p) < position(q)`;
//! * row sums, `sum_q x_{pq} = 1`;
//! * commutation with zeta, `sum_{r <= q} x_{pr} - sum_{r <= p} x_{rq} = 0`
//!   for every `(p, q)`;
//! * the trace row, `sum_{p,q} cl(p, q) x_{pq} = n`, where `cl` counts common
//!   lower bounds.
//!
//! Nonnegativity of every variable is implicit.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::incidence::RationalMatrix;
use crate::lattice::{Lattice, Poset};
use crate::linalg;
use crate::lp::{LinearRow, LpProblem};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstraintFamily {
    Nonnegativity,
    Symmetry,
    RowSum,
    Commutation,
    Trace,
}

impl ConstraintFamily {
    pub const EQUALITIES: [ConstraintFamily; 4] = [
        ConstraintFamily::Symmetry,
        ConstraintFamily::RowSum,
        ConstraintFamily::Commutation,
        ConstraintFamily::Trace,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConstraintFamily::Nonnegativity => "nonnegativity",
            ConstraintFamily::Symmetry => "symmetry",
            ConstraintFamily::RowSum => "row_sum",
            ConstraintFamily::Commutation => "commutation",
            ConstraintFamily::Trace => "trace",
        }
    }
}

impl fmt::Display for ConstraintFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolytopeError {
    #[error("point has {found} coordinates, system has {expected} variables")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("internal error: integral point is not a permutation matrix (row {row})")]
    NotAPermutation { row: usize },
    #[error("internal error: extracted permutation is not an involution at {element}")]
    NotAnInvolution { element: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    LiftedPermutation,
    LpSolution,
    ConvexCombination,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPoint {
    pub coords: Vec<Rational>,
    pub provenance: Option<Provenance>,
}

impl RationalPoint {
    pub fn new(coords: Vec<Rational>, provenance: Option<Provenance>) -> Self {
        RationalPoint { coords, provenance }
    }

    /// Convex combination `(1 - t) * self + t * other`.
    pub fn combine(&self, other: &Self, t: &Rational) -> Result<Self, PolytopeError> {
        if self.coords.len() != other.coords.len() {
            return Err(PolytopeError::DimensionMismatch {
                expected: self.coords.len(),
                found: other.coords.len(),
            });
        }
        let s = Rational::one() - t;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| &s * a + t * b)
            .collect();
        Ok(RationalPoint::new(coords, Some(Provenance::ConvexCombination)))
    }

    pub fn midpoint(&self, other: &Self) -> Result<Self, PolytopeError> {
        self.combine(other, &Rational::new(1.into(), 2.into()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equality {
    pub family: ConstraintFamily,
    pub row: LinearRow,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSystem {
    n: usize,
    /// `pairs[var] = (p, q)` as element indices.
    pairs: Vec<(usize, usize)>,
    var_of: Vec<usize>,
    equalities: Vec<Equality>,
    lower_costs: Vec<Rational>,
    upper_costs: Vec<Rational>,
}

fn count(value: u64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Builds the full system for a lattice.
pub fn build_polytope(lattice: &Lattice) -> ConstraintSystem {
    ConstraintSystem::for_poset(lattice.poset())
}

impl ConstraintSystem {
    /// The same rows for any poset; only the trace row's meaning depends on
    /// the poset being a lattice.
    pub fn for_poset(poset: &Poset) -> Self {
        let n = poset.len();
        let ext = poset.extension();
        let mut pairs = Vec::with_capacity(n * n);
        let mut var_of = vec![0; n * n];
        for &p in ext {
            for &q in ext {
                var_of[p * n + q] = pairs.len();
                pairs.push((p, q));
            }
        }
        let var = |p: usize, q: usize| var_of[p * n + q];
        let one = Rational::one;

        let mut equalities = Vec::new();
        let mut push = |family, terms: Vec<(usize, Rational)>, rhs| {
            equalities.push(Equality {
                family,
                row: LinearRow::new(terms, rhs),
            })
        };

        for (i, &p) in ext.iter().enumerate() {
            for &q in &ext[i + 1..] {
                push(
                    ConstraintFamily::Symmetry,
                    vec![(var(p, q), one()), (var(q, p), -one())],
                    Rational::zero(),
                );
            }
        }
        for &p in ext {
            push(
                ConstraintFamily::RowSum,
                ext.iter().map(|&q| (var(p, q), one())).collect(),
                one(),
            );
        }
        for &p in ext {
            for &q in ext {
                let mut coefs: BTreeMap<usize, i64> = BTreeMap::new();
                for &r in ext {
                    if poset.leq(r, q) {
                        *coefs.entry(var(p, r)).or_default() += 1;
                    }
                    if poset.leq(r, p) {
                        *coefs.entry(var(r, q)).or_default() -= 1;
                    }
                }
                let terms = coefs
                    .into_iter()
                    .filter(|&(_, c)| c != 0)
                    .map(|(v, c)| (v, Rational::from_integer(c.into())))
                    .collect();
                push(ConstraintFamily::Commutation, terms, Rational::zero());
            }
        }

        let lower = poset.common_lower_counts();
        let upper = poset.common_upper_counts();
        let per_var =
            |counts: &[u64]| -> Vec<Rational> { pairs.iter().map(|&(p, q)| count(counts[p * n + q])).collect() };
        let lower_costs = per_var(&lower);
        let upper_costs = per_var(&upper);
        push(
            ConstraintFamily::Trace,
            lower_costs.iter().cloned().enumerate().collect(),
            count(n as u64),
        );

        ConstraintSystem {
            n,
            pairs,
            var_of,
            equalities,
            lower_costs,
            upper_costs,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_vars(&self) -> usize {
        self.pairs.len()
    }

    pub fn var(&self, p: usize, q: usize) -> usize {
        self.var_of[p * self.n + q]
    }

    pub fn pair(&self, var: usize) -> (usize, usize) {
        self.pairs[var]
    }

    pub fn equalities(&self) -> &[Equality] {
        &self.equalities
    }

    pub fn family_rows(&self, family: ConstraintFamily) -> impl Iterator<Item = &LinearRow> {
        self.equalities
            .iter()
            .filter(move |e| e.family == family)
            .map(|e| &e.row)
    }

    /// Per-variable common-lower-bound counts (the trace row's coefficients).
    pub fn lower_costs(&self) -> &[Rational] {
        &self.lower_costs
    }

    /// Per-variable common-upper-bound counts.
    pub fn upper_costs(&self) -> &[Rational] {
        &self.upper_costs
    }

    /// LP over every equality except the trace row, with the given costs.
    pub fn relaxation(&self, costs: Vec<Rational>) -> LpProblem {
        let rows = self
            .equalities
            .iter()
            .filter(|e| e.family != ConstraintFamily::Trace)
            .map(|e| e.row.clone())
            .collect();
        LpProblem::with_rows(costs, rows)
    }

    /// The point with `x_{pq}` = `matrix[(p, q)]`.
    pub fn point_from_matrix(&self, matrix: &RationalMatrix, provenance: Option<Provenance>) -> RationalPoint {
        let coords = self.pairs.iter().map(|&(p, q)| matrix.get(p, q).clone()).collect();
        RationalPoint::new(coords, provenance)
    }

    pub fn matrix_from_point(&self, point: &RationalPoint) -> RationalMatrix {
        let mut m = RationalMatrix::zeros(self.n);
        for (var, &(p, q)) in self.pairs.iter().enumerate() {
            m.set(p, q, point.coords[var].clone());
        }
        m
    }

    fn check_dim(&self, point: &RationalPoint) -> Result<(), PolytopeError> {
        if point.coords.len() == self.num_vars() {
            Ok(())
        } else {
            Err(PolytopeError::DimensionMismatch {
                expected: self.num_vars(),
                found: point.coords.len(),
            })
        }
    }

    pub fn membership(&self, point: &RationalPoint) -> Result<MembershipReport, PolytopeError> {
        self.check_dim(point)?;
        let mut families = Vec::new();
        families.push(FamilyReport {
            family: ConstraintFamily::Nonnegativity,
            rows: self.num_vars(),
            first_violation: point.coords.iter().position(|x| x.is_negative()),
        });
        for family in ConstraintFamily::EQUALITIES {
            let mut rows = 0;
            let mut first_violation = None;
            for (k, eq) in self.equalities.iter().enumerate().filter(|(_, e)| e.family == family) {
                rows += 1;
                if first_violation.is_none() && !eq.row.residual(&point.coords).is_zero() {
                    first_violation = Some(k);
                }
            }
            families.push(FamilyReport {
                family,
                rows,
                first_violation,
            });
        }
        Ok(MembershipReport { families })
    }

    /// If every coordinate is 0 or 1, the involution the point encodes.
    pub fn is_integer_point(&self, point: &RationalPoint) -> Result<Option<Vec<usize>>, PolytopeError> {
        self.check_dim(point)?;
        if !point.coords.iter().all(|x| x.is_zero() || x.is_one()) {
            return Ok(None);
        }
        let mut sigma = vec![usize::MAX; self.n];
        for (var, x) in point.coords.iter().enumerate() {
            if x.is_one() {
                let (p, q) = self.pairs[var];
                if sigma[p] != usize::MAX {
                    return Err(PolytopeError::NotAPermutation { row: p });
                }
                sigma[p] = q;
            }
        }
        if let Some(row) = sigma.iter().position(|&q| q == usize::MAX) {
            return Err(PolytopeError::NotAPermutation { row });
        }
        if let Some(element) = (0..self.n).find(|&p| sigma[sigma[p]] != p) {
            return Err(PolytopeError::NotAnInvolution { element });
        }
        Ok(Some(sigma))
    }

    /// Vertex test for a member point.
    ///
    /// Active constraints are every equality row plus `x_i >= 0` for each
    /// zero coordinate. The point is a vertex iff they have full rank, i.e.
    /// iff the equality rows restricted to the support columns are
    /// independent as columns.
    pub fn is_vertex(&self, point: &RationalPoint) -> Result<bool, PolytopeError> {
        self.check_dim(point)?;
        let support: Vec<usize> = (0..self.num_vars()).filter(|&i| !point.coords[i].is_zero()).collect();
        let mut column = vec![usize::MAX; self.num_vars()];
        for (k, &var) in support.iter().enumerate() {
            column[var] = k;
        }
        let rows: Vec<Vec<Rational>> = self
            .equalities
            .iter()
            .map(|e| {
                let mut dense = vec![Rational::zero(); support.len()];
                for (var, coef) in &e.row.terms {
                    if column[*var] != usize::MAX {
                        dense[column[*var]] += coef;
                    }
                }
                dense
            })
            .filter(|row| row.iter().any(|x| !x.is_zero()))
            .collect();
        Ok(linalg::rational_rank(&rows) == support.len())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyReport {
    pub family: ConstraintFamily,
    pub rows: usize,
    /// Index into [`ConstraintSystem::equalities`], or the variable index for
    /// nonnegativity.
    pub first_violation: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipReport {
    pub families: Vec<FamilyReport>,
}

impl MembershipReport {
    pub fn is_member(&self) -> bool {
        self.families.iter().all(|f| f.first_violation.is_none())
    }

    pub fn family(&self, family: ConstraintFamily) -> &FamilyReport {
        self.families
            .iter()
            .find(|f| f.family == family)
            .expect("every family is reported")
    }

    pub fn first_violation(&self) -> Option<(ConstraintFamily, usize)> {
        self.families
            .iter()
            .find_map(|f| f.first_violation.map(|k| (f.family, k)))
    }
}
