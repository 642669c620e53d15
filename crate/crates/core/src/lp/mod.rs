//! Exact two-phase simplex: minimize `c.x` subject to `A x = b`, `x >= 0`.
//!
//! The tableau is dense and holds arbitrary-precision rationals. Pivoting
//! follows Bland's rule (lowest eligible column enters, ties in the ratio
//! test leave by lowest basic column), so degenerate problems terminate.
//! Phase one starts from one artificial column per row; rows that stay
//! covered by an artificial at level zero are linearly dependent and are
//! simply carried along, which is how rank-deficient systems are absorbed.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::rational::Rational;

pub mod presolve;

pub const DEFAULT_PIVOT_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("pivot cap reached after {pivots} pivots")]
    PivotCap { pivots: u64 },
    #[error("variable {var} out of range for {num_vars} variables")]
    VariableOutOfRange { var: usize, num_vars: usize },
    #[error("frozen value for variable {var} is negative")]
    NegativeAssignment { var: usize },
}

/// Sparse equality row `sum(coef * x[var]) = rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearRow {
    pub terms: Vec<(usize, Rational)>,
    pub rhs: Rational,
}

impl LinearRow {
    pub fn new(terms: Vec<(usize, Rational)>, rhs: Rational) -> Self {
        LinearRow { terms, rhs }
    }

    pub fn evaluate(&self, x: &[Rational]) -> Rational {
        self.terms
            .iter()
            .fold(Rational::zero(), |acc, (var, coef)| acc + coef * &x[*var])
    }

    /// `lhs - rhs` at `x`.
    pub fn residual(&self, x: &[Rational]) -> Rational {
        self.evaluate(x) - &self.rhs
    }
}

/// Linear program in equality form; every variable is nonnegative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpProblem {
    pub costs: Vec<Rational>,
    pub rows: Vec<LinearRow>,
}

impl LpProblem {
    pub fn new(costs: Vec<Rational>) -> Self {
        LpProblem {
            costs,
            rows: Vec::new(),
        }
    }

    pub fn with_rows(costs: Vec<Rational>, rows: Vec<LinearRow>) -> Self {
        LpProblem { costs, rows }
    }

    pub fn num_vars(&self) -> usize {
        self.costs.len()
    }

    pub fn push_row(&mut self, terms: Vec<(usize, Rational)>, rhs: Rational) {
        self.rows.push(LinearRow::new(terms, rhs));
    }

    pub fn objective(&self, x: &[Rational]) -> Rational {
        self.costs
            .iter()
            .zip(x)
            .fold(Rational::zero(), |acc, (c, v)| acc + c * v)
    }

    fn validate(&self) -> Result<(), LpError> {
        let num_vars = self.num_vars();
        for row in &self.rows {
            for &(var, _) in &row.terms {
                if var >= num_vars {
                    return Err(LpError::VariableOutOfRange { var, num_vars });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LpOptions {
    /// Per-solve limit on simplex pivots.
    pub pivot_cap: u64,
    pub presolve: bool,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions {
            pivot_cap: DEFAULT_PIVOT_CAP,
            presolve: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Full-length primal point, frozen variables included.
    pub point: Option<Vec<Rational>>,
    pub value: Option<Rational>,
    /// One multiplier per problem row proving `value` is a lower bound.
    pub dual: Option<Vec<Rational>>,
    pub pivots: u64,
}

impl LpSolution {
    fn without_point(status: LpStatus, pivots: u64) -> Self {
        LpSolution {
            status,
            point: None,
            value: None,
            dual: None,
            pivots,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

pub fn solve(problem: &LpProblem, options: &LpOptions) -> Result<LpSolution, LpError> {
    solve_with_frozen(problem, &BTreeMap::new(), options)
}

/// Solves with the given variables fixed to the given values.
///
/// Frozen variables are substituted into the rows before anything else; an
/// assignment that contradicts the rows yields `Infeasible`. With
/// `options.presolve` set, the reductions in [`presolve`] run before the
/// simplex and the dual certificate is carried back to the original rows.
pub fn solve_with_frozen(
    problem: &LpProblem,
    frozen: &BTreeMap<usize, Rational>,
    options: &LpOptions,
) -> Result<LpSolution, LpError> {
    problem.validate()?;
    let num_vars = problem.num_vars();
    for (&var, value) in frozen {
        if var >= num_vars {
            return Err(LpError::VariableOutOfRange { var, num_vars });
        }
        if value.is_negative() {
            return Err(LpError::NegativeAssignment { var });
        }
    }
    let reduction = if options.presolve {
        presolve::Reduction::new(problem, frozen)
    } else {
        presolve::Reduction::substitute_only(problem, frozen)
    };
    let Some(reduced) = reduction.reduced() else {
        return Ok(LpSolution::without_point(LpStatus::Infeasible, 0));
    };
    let inner = simplex(reduced, options)?;
    if inner.status != LpStatus::Optimal {
        return Ok(LpSolution::without_point(inner.status, inner.pivots));
    }
    let point = reduction.expand_point(inner.point.as_deref().expect("optimal point"));
    let dual = reduction.expand_dual(problem, inner.dual.as_deref().expect("optimal dual"));
    Ok(LpSolution {
        status: LpStatus::Optimal,
        value: Some(problem.objective(&point)),
        point: Some(point),
        dual: Some(dual),
        pivots: inner.pivots,
    })
}

/// Two-phase simplex on a problem with no frozen variables.
fn simplex(problem: &LpProblem, options: &LpOptions) -> Result<LpSolution, LpError> {
    let k = problem.num_vars();
    let m = problem.rows.len();
    let width = k + m + 1;
    let mut signs = Vec::with_capacity(m);
    let mut rows = Vec::with_capacity(m);
    for (i, row) in problem.rows.iter().enumerate() {
        let mut dense = vec![Rational::zero(); width];
        let mut rhs = row.rhs.clone();
        for (var, coef) in &row.terms {
            dense[*var] += coef;
        }
        let negate = rhs.is_negative();
        if negate {
            rhs = -rhs;
            for entry in &mut dense[..k] {
                *entry = -core::mem::take(entry);
            }
        }
        dense[k + i] = Rational::from_integer(1.into());
        dense[width - 1] = rhs;
        signs.push(negate);
        rows.push(dense);
    }

    let mut tableau = Tableau {
        rows,
        objective: vec![Rational::zero(); width],
        basis: (k..k + m).collect(),
        pivots: 0,
        cap: options.pivot_cap,
    };

    // Phase one: minimize the sum of artificials.
    for row in &tableau.rows {
        for (j, entry) in row[..k].iter().enumerate() {
            if !entry.is_zero() {
                tableau.objective[j] -= entry;
            }
        }
        tableau.objective[width - 1] -= &row[width - 1];
    }
    if tableau.run(k)? == Phase::Unbounded {
        unreachable!("phase one objective is bounded below by zero");
    }
    if !tableau.objective[width - 1].is_zero() {
        return Ok(LpSolution::without_point(LpStatus::Infeasible, tableau.pivots));
    }
    for r in 0..m {
        if tableau.basis[r] >= k {
            if let Some(c) = (0..k).find(|&c| !tableau.rows[r][c].is_zero()) {
                tableau.pivot(r, c)?;
            }
        }
    }

    // Phase two. Artificials keep cost zero and never re-enter.
    let column_cost = |col: usize| -> Rational {
        if col < k {
            problem.costs[col].clone()
        } else {
            Rational::zero()
        }
    };
    let mut objective: Vec<Rational> = (0..width - 1).map(column_cost).collect();
    objective.push(Rational::zero());
    for (r, row) in tableau.rows.iter().enumerate() {
        let cost = column_cost(tableau.basis[r]);
        if cost.is_zero() {
            continue;
        }
        for (j, entry) in row.iter().enumerate() {
            if !entry.is_zero() {
                objective[j] -= &cost * entry;
            }
        }
    }
    tableau.objective = objective;
    if tableau.run(k)? == Phase::Unbounded {
        return Ok(LpSolution::without_point(LpStatus::Unbounded, tableau.pivots));
    }

    let mut point = vec![Rational::zero(); k];
    for (r, &col) in tableau.basis.iter().enumerate() {
        if col < k {
            point[col] = tableau.rows[r][width - 1].clone();
        }
    }
    let value = problem.objective(&point);
    debug_assert_eq!(value, -tableau.objective[width - 1].clone());
    // Reduced cost of artificial i is -y_i.
    let dual = (0..m)
        .map(|i| {
            let y = -tableau.objective[k + i].clone();
            if signs[i] {
                -y
            } else {
                y
            }
        })
        .collect();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        point: Some(point),
        value: Some(value),
        dual: Some(dual),
        pivots: tableau.pivots,
    })
}

#[derive(Debug, PartialEq, Eq)]
enum Phase {
    Optimal,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    /// Reduced costs; the last entry is minus the current objective value.
    objective: Vec<Rational>,
    basis: Vec<usize>,
    pivots: u64,
    cap: u64,
}

impl Tableau {
    /// Bland's rule over columns `0..entering_limit`.
    fn run(&mut self, entering_limit: usize) -> Result<Phase, LpError> {
        let rhs = self.objective.len() - 1;
        loop {
            let Some(col) = (0..entering_limit).find(|&j| self.objective[j].is_negative()) else {
                return Ok(Phase::Optimal);
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if !row[col].is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / &row[col];
                let better = match &leave {
                    None => true,
                    Some((best, best_ratio)) => {
                        ratio < *best_ratio || (ratio == *best_ratio && self.basis[r] < self.basis[*best])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, col)?,
                None => return Ok(Phase::Unbounded),
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) -> Result<(), LpError> {
        self.pivots += 1;
        if self.pivots > self.cap {
            return Err(LpError::PivotCap {
                pivots: self.pivots - 1,
            });
        }
        let mut pivot_row = core::mem::take(&mut self.rows[r]);
        let scale = pivot_row[c].recip();
        let nonzero: Vec<usize> = (0..pivot_row.len()).filter(|&j| !pivot_row[j].is_zero()).collect();
        for &j in &nonzero {
            pivot_row[j] *= &scale;
        }
        let eliminate = |target: &mut Vec<Rational>| {
            if target[c].is_zero() {
                return;
            }
            let factor = target[c].clone();
            for &j in &nonzero {
                target[j] -= &factor * &pivot_row[j];
            }
        };
        for row in self.rows.iter_mut() {
            if !row.is_empty() {
                eliminate(row);
            }
        }
        eliminate(&mut self.objective);
        self.rows[r] = pivot_row;
        self.basis[r] = c;
        Ok(())
    }
}

/// Checks an optimal solution exactly: zero residuals, nonnegativity,
/// frozen values honoured, and the stated value.
pub fn verify_primal(problem: &LpProblem, frozen: &BTreeMap<usize, Rational>, solution: &LpSolution) -> bool {
    let (Some(point), Some(value)) = (&solution.point, &solution.value) else {
        return false;
    };
    point.len() == problem.num_vars()
        && point.iter().all(|x| !x.is_negative())
        && problem.rows.iter().all(|row| row.residual(point).is_zero())
        && frozen.iter().all(|(&v, x)| point[v] == *x)
        && problem.objective(point) == *value
}

/// Checks the dual certificate: `y.A_j <= c_j` on every free column and
/// `y.(b - A_F x_F) + c_F.x_F` equal to the optimal value, which proves that
/// no feasible point has a smaller objective.
pub fn verify_dual(problem: &LpProblem, frozen: &BTreeMap<usize, Rational>, solution: &LpSolution) -> bool {
    let (Some(dual), Some(value)) = (&solution.dual, &solution.value) else {
        return false;
    };
    if dual.len() != problem.rows.len() {
        return false;
    }
    let mut priced = problem.costs.clone();
    let mut bound = frozen
        .iter()
        .fold(Rational::zero(), |acc, (&v, x)| acc + &problem.costs[v] * x);
    for (row, y) in problem.rows.iter().zip(dual) {
        if y.is_zero() {
            continue;
        }
        let mut rhs = row.rhs.clone();
        for (var, coef) in &row.terms {
            match frozen.get(var) {
                Some(x) => rhs -= coef * x,
                None => priced[*var] -= y * coef,
            }
        }
        bound += y * rhs;
    }
    bound == *value
        && priced
            .iter()
            .enumerate()
            .all(|(v, reduced)| frozen.contains_key(&v) || !reduced.is_negative())
}
