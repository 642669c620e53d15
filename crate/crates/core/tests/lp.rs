use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use orthoforge_core::lp::{self, verify_dual, verify_primal, LinearRow, LpError, LpOptions, LpProblem, LpStatus};
use orthoforge_core::rational::int;
use orthoforge_core::Rational;
use proptest::prelude::*;

/// Solves `a x = b` by elimination; `None` when inconsistent or when the
/// solution is not unique.
fn unique_solution(a: &[Vec<Rational>], b: &[Rational], cols: usize) -> Option<Vec<Rational>> {
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(r, rhs)| r.iter().cloned().chain([rhs.clone()]).collect())
        .collect();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let p = (row..m.len()).find(|&r| !m[r][col].is_zero())?;
        m.swap(row, p);
        let pv = m[row][col].clone();
        m[row].iter_mut().for_each(|x| *x /= &pv);
        let pivot_row = m[row].clone();
        for (_, other) in m.iter_mut().enumerate().filter(|(r, _)| *r != row) {
            let f = other[col].clone();
            for (x, p) in other.iter_mut().zip(&pivot_row) {
                *x -= p * &f;
            }
        }
        pivot_cols.push(col);
        row += 1;
    }
    if m[row..].iter().any(|r| !r[cols].is_zero()) {
        return None;
    }
    Some((0..cols).map(|c| m[c][cols].clone()).collect())
}

/// Optimum over nonnegative solutions by enumerating every basic solution:
/// each column subset with a unique solution on it, the rest zero. Costs are
/// nonnegative, so a feasible problem attains its optimum at one of them.
fn vertex_oracle(problem: &LpProblem) -> Option<Rational> {
    let n = problem.num_vars();
    let dense: Vec<Vec<Rational>> = problem
        .rows
        .iter()
        .map(|r| {
            let mut row = vec![int(0); n];
            for (v, c) in &r.terms {
                row[*v] += c;
            }
            row
        })
        .collect();
    let b: Vec<Rational> = problem.rows.iter().map(|r| r.rhs.clone()).collect();
    let mut best: Option<Rational> = None;
    for mask in 0u32..1 << n {
        let cols: Vec<usize> = (0..n).filter(|c| mask >> c & 1 == 1).collect();
        let sub: Vec<Vec<Rational>> = dense
            .iter()
            .map(|r| cols.iter().map(|&c| r[c].clone()).collect())
            .collect();
        let Some(x_b) = unique_solution(&sub, &b, cols.len()) else {
            continue;
        };
        if x_b.iter().any(|x| x.is_negative()) {
            continue;
        }
        let mut x = vec![int(0); n];
        for (k, &c) in cols.iter().enumerate() {
            x[c] = x_b[k].clone();
        }
        let value = problem.objective(&x);
        if best.as_ref().is_none_or(|v| value < *v) {
            best = Some(value);
        }
    }
    best
}

fn random_problem() -> impl Strategy<Value = LpProblem> {
    (1usize..=6, 1usize..=4).prop_flat_map(|(n, m)| {
        (
            proptest::collection::vec(proptest::collection::vec(-2i64..=2, n), m),
            proptest::collection::vec(0i64..=2, n),
            proptest::collection::vec(0i64..=3, n),
            any::<bool>(),
            proptest::collection::vec(-3i64..=3, m),
        )
            .prop_map(move |(a, x0, costs, feasible, raw_b)| {
                let rows = a
                    .iter()
                    .enumerate()
                    .map(|(i, r)| {
                        let rhs = if feasible {
                            r.iter().zip(&x0).map(|(c, x)| c * x).sum()
                        } else {
                            raw_b[i]
                        };
                        LinearRow::new(r.iter().enumerate().map(|(v, &c)| (v, int(c))).collect(), int(rhs))
                    })
                    .collect();
                LpProblem::with_rows(costs.into_iter().map(int).collect(), rows)
            })
    })
}

fn with_redundancy(mut problem: LpProblem) -> LpProblem {
    if let (Some(a), Some(b)) = (problem.rows.first().cloned(), problem.rows.last().cloned()) {
        let mut terms: BTreeMap<usize, Rational> = BTreeMap::new();
        for (v, c) in a.terms.iter().chain(&b.terms) {
            *terms.entry(*v).or_insert_with(Rational::zero) += c;
        }
        problem
            .rows
            .push(LinearRow::new(terms.into_iter().collect(), &a.rhs + &b.rhs));
        problem.rows.push(LinearRow::new(
            a.terms.iter().map(|(v, c)| (*v, c * int(-3))).collect(),
            &a.rhs * int(-3),
        ));
    }
    problem
}

fn options(presolve: bool) -> LpOptions {
    LpOptions {
        presolve,
        ..LpOptions::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 400, ..ProptestConfig::default() })]

    #[test]
    fn optimum_matches_vertex_enumeration(problem in random_problem(), redundant in any::<bool>()) {
        let problem = if redundant { with_redundancy(problem) } else { problem };
        let oracle = vertex_oracle(&problem);
        let frozen = BTreeMap::new();
        for presolve in [true, false] {
            let s = lp::solve(&problem, &options(presolve)).unwrap();
            match &oracle {
                None => prop_assert_eq!(s.status, LpStatus::Infeasible),
                Some(v) => {
                    prop_assert_eq!(s.status, LpStatus::Optimal);
                    prop_assert_eq!(s.value.as_ref(), Some(v));
                    prop_assert!(verify_primal(&problem, &frozen, &s));
                    prop_assert!(verify_dual(&problem, &frozen, &s));
                    let x = s.point.as_ref().unwrap();
                    for row in &problem.rows {
                        prop_assert!(row.residual(x).is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn solving_is_deterministic(problem in random_problem()) {
        let a = lp::solve(&problem, &LpOptions::default());
        let b = lp::solve(&problem, &LpOptions::default());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn freezing_matches_explicit_rows(problem in random_problem(), var in 0usize..6, value in 0i64..=2) {
        let var = var % problem.num_vars();
        let mut frozen = BTreeMap::new();
        frozen.insert(var, int(value));
        let mut pinned = problem.clone();
        pinned.push_row(vec![(var, int(1))], int(value));
        for presolve in [true, false] {
            let a = lp::solve_with_frozen(&problem, &frozen, &options(presolve)).unwrap();
            let b = lp::solve(&pinned, &options(presolve)).unwrap();
            prop_assert_eq!(a.status, b.status);
            prop_assert_eq!(&a.value, &b.value);
            if a.is_optimal() {
                prop_assert_eq!(&a.point.as_ref().unwrap()[var], &int(value));
                prop_assert!(verify_primal(&problem, &frozen, &a));
                prop_assert!(verify_dual(&problem, &frozen, &a));
            }
        }
    }
}

/// `k x k` assignment problem with every cost equal: maximally degenerate,
/// every permutation optimal.
fn flat_assignment(k: usize) -> LpProblem {
    let mut p = LpProblem::new(vec![int(1); k * k]);
    for i in 0..k {
        p.push_row((0..k).map(|j| (i * k + j, int(1))).collect(), int(1));
        p.push_row((0..k).map(|j| (j * k + i, int(1))).collect(), int(1));
    }
    p
}

#[test]
fn degenerate_assignment_problems() {
    for k in 1..=6 {
        let p = flat_assignment(k);
        for presolve in [true, false] {
            let s = lp::solve(&p, &options(presolve)).unwrap();
            assert_eq!(s.value, Some(int(k as i64)));
            assert!(verify_primal(&p, &BTreeMap::new(), &s));
            assert!(verify_dual(&p, &BTreeMap::new(), &s));
        }
    }
}

#[test]
fn frozen_examples() {
    // x0 + x1 = 1, minimise x0: freezing x1 = 0 forces x0 = 1.
    let p = LpProblem::with_rows(
        vec![int(1), int(0)],
        vec![LinearRow::new(vec![(0, int(1)), (1, int(1))], int(1))],
    );
    let mut frozen = BTreeMap::new();
    assert_eq!(
        lp::solve_with_frozen(&p, &frozen, &LpOptions::default()).unwrap().value,
        Some(int(0))
    );
    frozen.insert(1, int(0));
    let s = lp::solve_with_frozen(&p, &frozen, &LpOptions::default()).unwrap();
    assert_eq!(s.value, Some(int(1)));
    assert_eq!(s.point, Some(vec![int(1), int(0)]));
    frozen.insert(1, int(2));
    assert_eq!(
        lp::solve_with_frozen(&p, &frozen, &LpOptions::default())
            .unwrap()
            .status,
        LpStatus::Infeasible
    );
    frozen.clear();
    frozen.insert(7, int(0));
    assert!(matches!(
        lp::solve_with_frozen(&p, &frozen, &LpOptions::default()),
        Err(LpError::VariableOutOfRange { .. })
    ));
}

#[test]
fn pivot_cap_is_a_hard_error() {
    let p = flat_assignment(4);
    let capped = LpOptions {
        pivot_cap: 2,
        presolve: false,
    };
    assert!(matches!(lp::solve(&p, &capped), Err(LpError::PivotCap { .. })));
}
