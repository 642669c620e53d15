//! Exact reductions applied before the simplex, and their inverses.
//!
//! Rows are scanned repeatedly until none of these applies:
//!
//! * an empty row is dropped (or proves infeasibility when `rhs != 0`);
//! * a single-term row `a x_g = b` fixes `x_g = b / a`;
//! * a row with `rhs = 0` whose coefficients share one sign forces every
//!   variable in it to zero;
//! * a row whose coefficients share one sign opposite to `rhs` is infeasible;
//! * a row `a x_i - a x_j = 0` over two unmerged variables merges `x_j` into
//!   `x_i` (their columns and costs are added).
//!
//! Every removal is logged so that both the primal point and the dual
//! multipliers can be rebuilt for the original rows.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use super::{LinearRow, LpProblem};
use crate::rational::Rational;

#[derive(Debug, Clone)]
enum Step {
    Dropped,
    Singleton {
        row: usize,
        group: usize,
        coef: Rational,
    },
    Forcing {
        row: usize,
        groups: Vec<(usize, Rational)>,
    },
    Merge {
        row: usize,
        keep: usize,
        gone: usize,
        coef: Rational,
    },
}

#[derive(Debug, Clone)]
struct WorkRow {
    terms: BTreeMap<usize, Rational>,
    rhs: Rational,
}

#[derive(Debug, Clone)]
pub struct Reduction {
    /// `None` once a row proved the system infeasible.
    reduced: Option<LpProblem>,
    /// Representative variable of each reduced column.
    columns: Vec<usize>,
    /// Original index of each reduced row.
    rows: Vec<usize>,
    group_of: Vec<usize>,
    members: BTreeMap<usize, Vec<usize>>,
    fixed: BTreeMap<usize, Rational>,
    frozen: BTreeMap<usize, Rational>,
    steps: Vec<Step>,
}

impl Reduction {
    /// Substitutes frozen variables and nothing else.
    pub fn substitute_only(problem: &LpProblem, frozen: &BTreeMap<usize, Rational>) -> Self {
        let mut reduction = Self::start(problem, frozen);
        reduction.finish(problem, Self::substituted_rows(problem, frozen));
        reduction
    }

    pub fn new(problem: &LpProblem, frozen: &BTreeMap<usize, Rational>) -> Self {
        let mut reduction = Self::start(problem, frozen);
        let mut work = Self::substituted_rows(problem, frozen);
        let feasible = reduction.reduce(&mut work);
        if feasible {
            reduction.finish(problem, work);
        }
        reduction
    }

    fn start(problem: &LpProblem, frozen: &BTreeMap<usize, Rational>) -> Self {
        let n = problem.num_vars();
        Reduction {
            reduced: None,
            columns: Vec::new(),
            rows: Vec::new(),
            group_of: (0..n).collect(),
            members: (0..n)
                .filter(|v| !frozen.contains_key(v))
                .map(|v| (v, vec![v]))
                .collect(),
            fixed: BTreeMap::new(),
            frozen: frozen.clone(),
            steps: Vec::new(),
        }
    }

    fn substituted_rows(problem: &LpProblem, frozen: &BTreeMap<usize, Rational>) -> Vec<Option<WorkRow>> {
        problem
            .rows
            .iter()
            .map(|row| {
                let mut terms: BTreeMap<usize, Rational> = BTreeMap::new();
                let mut rhs = row.rhs.clone();
                for (var, coef) in &row.terms {
                    match frozen.get(var) {
                        Some(value) => rhs -= coef * value,
                        None => *terms.entry(*var).or_insert_with(Rational::zero) += coef,
                    }
                }
                terms.retain(|_, c| !c.is_zero());
                Some(WorkRow { terms, rhs })
            })
            .collect()
    }

    /// Applies reductions until a fixed point. Returns false on infeasibility.
    fn reduce(&mut self, work: &mut [Option<WorkRow>]) -> bool {
        let mut changed = true;
        while changed {
            changed = false;
            for r in 0..work.len() {
                let Some(row) = &work[r] else { continue };
                let positive = row.terms.values().all(|c| c.is_positive());
                let negative = row.terms.values().all(|c| c.is_negative());
                let step = if row.terms.is_empty() {
                    if !row.rhs.is_zero() {
                        return false;
                    }
                    Step::Dropped
                } else if row.terms.len() == 1 {
                    let (&group, coef) = row.terms.iter().next().expect("one term");
                    let value = &row.rhs / coef;
                    if value.is_negative() {
                        return false;
                    }
                    let coef = coef.clone();
                    self.fix(work, group, value);
                    Step::Singleton { row: r, group, coef }
                } else if positive || negative {
                    if row.rhs.is_zero() {
                        let groups: Vec<(usize, Rational)> = row.terms.iter().map(|(&g, c)| (g, c.clone())).collect();
                        for &(g, _) in &groups {
                            self.fix(work, g, Rational::zero());
                        }
                        Step::Forcing { row: r, groups }
                    } else if row.rhs.is_positive() != positive {
                        return false;
                    } else {
                        continue;
                    }
                } else if let Some((keep, gone, coef)) = self.mergeable(row) {
                    self.merge(work, keep, gone);
                    Step::Merge {
                        row: r,
                        keep,
                        gone,
                        coef,
                    }
                } else {
                    continue;
                };
                work[r] = None;
                self.steps.push(step);
                changed = true;
            }
        }
        true
    }

    fn mergeable(&self, row: &WorkRow) -> Option<(usize, usize, Rational)> {
        if row.terms.len() != 2 || !row.rhs.is_zero() {
            return None;
        }
        let mut it = row.terms.iter();
        let (&i, a) = it.next()?;
        let (&j, b) = it.next()?;
        let singletons = self.members[&i].len() == 1 && self.members[&j].len() == 1;
        (singletons && (a + b).is_zero()).then(|| (i, j, a.clone()))
    }

    fn fix(&mut self, work: &mut [Option<WorkRow>], group: usize, value: Rational) {
        for row in work.iter_mut().flatten() {
            if let Some(coef) = row.terms.remove(&group) {
                row.rhs -= coef * &value;
            }
        }
        self.fixed.insert(group, value);
    }

    fn merge(&mut self, work: &mut [Option<WorkRow>], keep: usize, gone: usize) {
        for row in work.iter_mut().flatten() {
            if let Some(coef) = row.terms.remove(&gone) {
                let entry = row.terms.entry(keep).or_insert_with(Rational::zero);
                *entry += coef;
                if entry.is_zero() {
                    row.terms.remove(&keep);
                }
            }
        }
        let moved = self.members.remove(&gone).expect("live group");
        for &v in &moved {
            self.group_of[v] = keep;
        }
        self.members.get_mut(&keep).expect("live group").extend(moved);
    }

    fn finish(&mut self, problem: &LpProblem, work: Vec<Option<WorkRow>>) {
        self.columns = self
            .members
            .keys()
            .copied()
            .filter(|g| !self.fixed.contains_key(g))
            .collect();
        let mut column_of = BTreeMap::new();
        for (c, &g) in self.columns.iter().enumerate() {
            column_of.insert(g, c);
        }
        let costs = self
            .columns
            .iter()
            .map(|g| {
                self.members[g]
                    .iter()
                    .fold(Rational::zero(), |acc, &v| acc + &problem.costs[v])
            })
            .collect();
        let mut rows = Vec::new();
        for (r, row) in work.into_iter().enumerate() {
            if let Some(row) = row {
                self.rows.push(r);
                let terms = row.terms.into_iter().map(|(g, c)| (column_of[&g], c)).collect();
                rows.push(LinearRow::new(terms, row.rhs));
            }
        }
        self.reduced = Some(LpProblem::with_rows(costs, rows));
    }

    pub fn reduced(&self) -> Option<&LpProblem> {
        self.reduced.as_ref()
    }

    pub fn expand_point(&self, inner: &[Rational]) -> Vec<Rational> {
        let mut group_value: BTreeMap<usize, &Rational> = self.fixed.iter().map(|(&g, v)| (g, v)).collect();
        for (c, &g) in self.columns.iter().enumerate() {
            group_value.insert(g, &inner[c]);
        }
        (0..self.group_of.len())
            .map(|v| match self.frozen.get(&v) {
                Some(x) => x.clone(),
                None => group_value[&self.group_of[v]].clone(),
            })
            .collect()
    }

    /// Multipliers for the original rows, given those of the reduced rows.
    pub fn expand_dual(&self, problem: &LpProblem, inner: &[Rational]) -> Vec<Rational> {
        let mut y = vec![Rational::zero(); problem.rows.len()];
        for (k, &r) in self.rows.iter().enumerate() {
            y[r] = inner[k].clone();
        }
        let mut columns: Vec<Vec<(usize, &Rational)>> = vec![Vec::new(); problem.num_vars()];
        for (r, row) in problem.rows.iter().enumerate() {
            for (var, coef) in &row.terms {
                columns[*var].push((r, coef));
            }
        }
        // Reduced cost of a set of variables, ignoring one row.
        let reduced_cost = |y: &[Rational], vars: &[usize], skip: usize| {
            let mut d = Rational::zero();
            for &v in vars {
                d += &problem.costs[v];
                for &(r, coef) in &columns[v] {
                    if r != skip && !y[r].is_zero() {
                        d -= &y[r] * coef;
                    }
                }
            }
            d
        };
        for step in self.steps.iter().rev() {
            match step {
                Step::Dropped => {}
                Step::Singleton { row, group, coef } => {
                    y[*row] = reduced_cost(&y, &self.members[group], *row) / coef;
                }
                Step::Forcing { row, groups } => {
                    let ratios = groups
                        .iter()
                        .map(|(g, coef)| reduced_cost(&y, &self.members[g], *row) / coef);
                    let bound = if groups[0].1.is_positive() {
                        ratios.min()
                    } else {
                        ratios.max()
                    };
                    y[*row] = bound.expect("forcing row has terms");
                }
                Step::Merge { row, keep, gone, coef } => {
                    let d_keep = reduced_cost(&y, &[*keep], *row);
                    let d_gone = reduced_cost(&y, &[*gone], *row);
                    y[*row] = (d_keep - d_gone) / (coef * Rational::from_integer(2.into()));
                }
            }
        }
        y
    }
}
