//! Enumerating orthocomplementations.
//!
//! Two independent routes:
//!
//! * [`brute_force_orthos`] backtracks over involutive pairings using only
//!   the order relation and the meet table;
//! * [`lp_orthos`] minimizes a trace form (common upper bounds by default)
//!   over the relaxed polytope and branches on `x_{pq} = 0 / 1` until every
//!   integer optimum has been collected.
//!
//! Both end in [`verify_ortho`], and [`cross_check`] compares them.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::time::Duration;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::incidence::{conjointness_trace, disjointness_trace, lift_permutation};
use crate::lattice::Lattice;
use crate::lp::{self, LpError, LpOptions, LpProblem, LpStatus};
use crate::polytope::{ConstraintFamily, ConstraintSystem, PolytopeError, Provenance, RationalPoint};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Objective {
    /// Minimize `trace(zeta zeta^T alpha)`; disjointness is checked afterwards.
    #[default]
    Conjoint,
    /// Minimize `trace(zeta^T zeta alpha)`; conjointness is checked afterwards.
    Disjoint,
}

impl Objective {
    pub fn name(self) -> &'static str {
        match self {
            Objective::Conjoint => "conjoint",
            Objective::Disjoint => "disjoint",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    Lp,
    Brute,
    #[default]
    Both,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Lp => "lp",
            Method::Brute => "brute",
            Method::Both => "both",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub involution: bool,
    pub order_reversing: bool,
    pub disjoint: bool,
    pub conjoint: bool,
    pub disjointness_trace: Rational,
    pub conjointness_trace: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orthocomplementation {
    pub sigma: Vec<usize>,
    pub certificate: Certificate,
}

impl PartialOrd for Orthocomplementation {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Orthocomplementation {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.sigma.cmp(&other.sigma)
    }
}

/// First condition an orthocomplementation candidate failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrthoViolation {
    NotABijection {
        detail: &'static str,
    },
    NotAnInvolution {
        element: usize,
    },
    NotDisjoint {
        element: usize,
        image: usize,
    },
    NotOrderReversing {
        lower: usize,
        upper: usize,
    },
    NotConjoint {
        element: usize,
        image: usize,
    },
    TraceMismatch {
        disjointness: Rational,
        conjointness: Rational,
    },
}

impl OrthoViolation {
    pub fn condition(&self) -> &'static str {
        match self {
            OrthoViolation::NotABijection { .. } => "bijection",
            OrthoViolation::NotAnInvolution { .. } => "involution",
            OrthoViolation::NotDisjoint { .. } => "disjointness",
            OrthoViolation::NotOrderReversing { .. } => "order_reversal",
            OrthoViolation::NotConjoint { .. } => "conjointness",
            OrthoViolation::TraceMismatch { .. } => "trace",
        }
    }

    /// Witness pair as element indices, when there is one.
    pub fn witness(&self) -> Option<(usize, usize)> {
        match *self {
            OrthoViolation::NotAnInvolution { element } => Some((element, element)),
            OrthoViolation::NotDisjoint { element, image } | OrthoViolation::NotConjoint { element, image } => {
                Some((element, image))
            }
            OrthoViolation::NotOrderReversing { lower, upper } => Some((lower, upper)),
            _ => None,
        }
    }

    pub fn describe(&self, lattice: &Lattice) -> String {
        let l = |i: usize| lattice.label(i);
        match self {
            OrthoViolation::NotABijection { detail } => format!("not a bijection: {detail}"),
            OrthoViolation::NotAnInvolution { element } => {
                format!("not an involution at {}", l(*element))
            }
            OrthoViolation::NotDisjoint { element, image } => {
                format!("{} and its image {} are not disjoint", l(*element), l(*image))
            }
            OrthoViolation::NotOrderReversing { lower, upper } => format!(
                "order not reversed: {} <= {} but the images are not reversed",
                l(*lower),
                l(*upper)
            ),
            OrthoViolation::NotConjoint { element, image } => {
                format!("{} and its image {} are not conjoint", l(*element), l(*image))
            }
            OrthoViolation::TraceMismatch {
                disjointness,
                conjointness,
            } => format!(
                "trace values {disjointness} and {conjointness} differ from {}",
                lattice.len()
            ),
        }
    }
}

/// Checks every orthocomplementation condition of `sigma`.
///
/// Failures are reported in the order bijection, involution, disjointness,
/// order reversal, conjointness, traces; the witness is the first element
/// (or pair) in declaration order that breaks the condition.
pub fn verify_ortho(lattice: &Lattice, sigma: &[usize]) -> Result<Orthocomplementation, OrthoViolation> {
    let n = lattice.len();
    if sigma.len() != n {
        return Err(OrthoViolation::NotABijection { detail: "wrong length" });
    }
    let mut hit = vec![false; n];
    for &q in sigma {
        if q >= n {
            return Err(OrthoViolation::NotABijection {
                detail: "image out of range",
            });
        }
        if core::mem::replace(&mut hit[q], true) {
            return Err(OrthoViolation::NotABijection {
                detail: "repeated image",
            });
        }
    }

    let not_involution = (0..n).find(|&p| sigma[sigma[p]] != p);
    let not_disjoint = (0..n).find(|&p| lattice.meet_unchecked(p, sigma[p]) != lattice.bottom());
    let not_reversing = (0..n)
        .flat_map(|p| (0..n).map(move |q| (p, q)))
        .find(|&(p, q)| lattice.leq(p, q) && !lattice.leq(sigma[q], sigma[p]));
    let not_conjoint = (0..n).find(|&p| lattice.join_unchecked(p, sigma[p]) != lattice.top());

    let poset = lattice.poset();
    let lower = poset.common_lower_counts();
    let upper = poset.common_upper_counts();
    let trace =
        |counts: &[u64]| Rational::from_integer(BigInt::from((0..n).map(|p| counts[p * n + sigma[p]]).sum::<u64>()));
    let certificate = Certificate {
        involution: not_involution.is_none(),
        order_reversing: not_reversing.is_none(),
        disjoint: not_disjoint.is_none(),
        conjoint: not_conjoint.is_none(),
        disjointness_trace: trace(&lower),
        conjointness_trace: trace(&upper),
    };

    if let Some(element) = not_involution {
        return Err(OrthoViolation::NotAnInvolution { element });
    }
    if let Some(element) = not_disjoint {
        return Err(OrthoViolation::NotDisjoint {
            element,
            image: sigma[element],
        });
    }
    if let Some((lower, upper)) = not_reversing {
        return Err(OrthoViolation::NotOrderReversing { lower, upper });
    }
    if let Some(element) = not_conjoint {
        return Err(OrthoViolation::NotConjoint {
            element,
            image: sigma[element],
        });
    }
    let size = Rational::from_integer(BigInt::from(n));
    if certificate.disjointness_trace != size || certificate.conjointness_trace != size {
        return Err(OrthoViolation::TraceMismatch {
            disjointness: certificate.disjointness_trace,
            conjointness: certificate.conjointness_trace,
        });
    }
    Ok(Orthocomplementation {
        sigma: sigma.to_vec(),
        certificate,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NonexistenceCertificate {
    /// The relaxation at the root has no feasible point.
    RootInfeasible,
    /// The relaxation optimum already exceeds `n`.
    RootAboveFloor { optimum: Rational },
    /// The root optimum equals `n` but the exhausted tree held no integer optimum.
    Exhausted { root_optimum: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SearchStats {
    pub lp_solves: u64,
    pub branch_nodes: u64,
    pub pivots: u64,
    /// Smallest optimum over every feasible relaxation solved.
    pub min_relaxation: Option<Rational>,
    pub elapsed: Option<Duration>,
}

impl SearchStats {
    /// Adds counts from a disjoint part of the search.
    pub fn absorb(&mut self, other: &SearchStats) {
        self.lp_solves += other.lp_solves;
        self.branch_nodes += other.branch_nodes;
        self.pivots += other.pivots;
        if let Some(v) = &other.min_relaxation {
            self.note_relaxation(v);
        }
    }

    fn note_relaxation(&mut self, value: &Rational) {
        match &self.min_relaxation {
            Some(current) if current <= value => {}
            _ => self.min_relaxation = Some(value.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchReport {
    pub method: Method,
    pub orthos: Vec<Orthocomplementation>,
    pub nonexistence: Option<NonexistenceCertificate>,
    pub stats: SearchStats,
}

impl SearchReport {
    pub fn sigmas(&self) -> Vec<Vec<usize>> {
        self.orthos.iter().map(|o| o.sigma.clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("{source} (after {} LP solves)", .stats.lp_solves)]
    Lp { source: LpError, stats: SearchStats },
    #[error("internal error: relaxation unbounded")]
    Unbounded,
    #[error("internal error: relaxation optimum {value} is below the floor {floor}")]
    BelowFloor { value: Rational, floor: Rational },
    #[error("internal error: LP solution fails exact verification")]
    InexactSolution,
    #[error("internal error: integer optimum {sigma:?} fails verification ({condition})")]
    Unverified { sigma: Vec<usize>, condition: &'static str },
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

impl SearchError {
    pub fn is_resource_limit(&self) -> bool {
        matches!(
            self,
            SearchError::Lp {
                source: LpError::PivotCap { .. },
                ..
            }
        )
    }
}

/// The combinatorial oracle.
pub fn brute_force_orthos(lattice: &Lattice) -> SearchReport {
    let n = lattice.len();
    let mut sigma = vec![None; n];
    let mut found = Vec::new();
    let mut nodes = 0;
    backtrack(lattice, &mut sigma, &mut found, &mut nodes);
    found.sort();
    found.dedup();
    SearchReport {
        method: Method::Brute,
        orthos: found,
        nonexistence: None,
        stats: SearchStats {
            branch_nodes: nodes,
            ..SearchStats::default()
        },
    }
}

fn backtrack(
    lattice: &Lattice,
    sigma: &mut Vec<Option<usize>>,
    found: &mut Vec<Orthocomplementation>,
    nodes: &mut u64,
) {
    *nodes += 1;
    let Some(p) = sigma.iter().position(Option::is_none) else {
        let complete: Vec<usize> = sigma.iter().map(|s| s.expect("complete")).collect();
        if let Ok(ortho) = verify_ortho(lattice, &complete) {
            found.push(ortho);
        }
        return;
    };
    for q in p..lattice.len() {
        if sigma[q].is_some() || lattice.meet_unchecked(p, q) != lattice.bottom() {
            continue;
        }
        sigma[p] = Some(q);
        sigma[q] = Some(p);
        if reverses_order(lattice, sigma, p) && reverses_order(lattice, sigma, q) {
            backtrack(lattice, sigma, found, nodes);
        }
        sigma[p] = None;
        sigma[q] = None;
    }
}

/// Order reversal between `u` and every element assigned so far.
fn reverses_order(lattice: &Lattice, sigma: &[Option<usize>], u: usize) -> bool {
    let su = sigma[u].expect("assigned");
    sigma.iter().enumerate().all(|(v, sv)| match *sv {
        None => true,
        Some(sv) => (!lattice.leq(u, v) || lattice.leq(sv, su)) && (!lattice.leq(v, u) || lattice.leq(su, sv)),
    })
}

/// A branch-and-bound node: pair variables pinned to 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Node {
    pub frozen: BTreeMap<usize, Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Relaxation {
    Infeasible,
    Optimal(Rational),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeOutcome {
    pub relaxation: Relaxation,
    pub found: Option<Orthocomplementation>,
    pub children: Vec<Node>,
    pub pivots: u64,
}

/// The LP route, one node at a time, so that callers can schedule nodes as
/// they like. Expanding a node depends only on the node.
#[derive(Debug, Clone)]
pub struct LpSearch<'a> {
    lattice: &'a Lattice,
    system: ConstraintSystem,
    problem: LpProblem,
    options: LpOptions,
    floor: Rational,
}

impl<'a> LpSearch<'a> {
    pub fn new(lattice: &'a Lattice, objective: Objective, options: LpOptions) -> Self {
        let system = ConstraintSystem::for_poset(lattice.poset());
        let costs = match objective {
            Objective::Conjoint => system.upper_costs().to_vec(),
            Objective::Disjoint => system.lower_costs().to_vec(),
        };
        let problem = system.relaxation(costs);
        LpSearch {
            lattice,
            system,
            problem,
            options,
            floor: Rational::from_integer(BigInt::from(lattice.len())),
        }
    }

    pub fn system(&self) -> &ConstraintSystem {
        &self.system
    }

    pub fn problem(&self) -> &LpProblem {
        &self.problem
    }

    pub fn root(&self) -> Node {
        Node::default()
    }

    pub fn expand(&self, node: &Node) -> Result<NodeOutcome, SearchError> {
        let solution =
            lp::solve_with_frozen(&self.problem, &node.frozen, &self.options).map_err(|source| SearchError::Lp {
                source,
                stats: SearchStats::default(),
            })?;
        let pruned = |relaxation| NodeOutcome {
            relaxation,
            found: None,
            children: Vec::new(),
            pivots: solution.pivots,
        };
        let value = match solution.status {
            LpStatus::Infeasible => return Ok(pruned(Relaxation::Infeasible)),
            LpStatus::Unbounded => return Err(SearchError::Unbounded),
            LpStatus::Optimal => solution.value.clone().expect("optimal value"),
        };
        if value < self.floor {
            return Err(SearchError::BelowFloor {
                value,
                floor: self.floor.clone(),
            });
        }
        if value > self.floor {
            return Ok(pruned(Relaxation::Optimal(value)));
        }
        if !lp::verify_primal(&self.problem, &node.frozen, &solution) {
            return Err(SearchError::InexactSolution);
        }

        let x = solution.point.as_ref().expect("optimal point");
        let point = RationalPoint::new(x.clone(), Some(Provenance::LpSolution));
        let mut outcome = pruned(Relaxation::Optimal(value));
        let branch_var = match self.system.is_integer_point(&point)? {
            Some(sigma) => {
                let ortho = verify_ortho(self.lattice, &sigma).map_err(|violation| SearchError::Unverified {
                    sigma: sigma.clone(),
                    condition: violation.condition(),
                })?;
                outcome.found = Some(ortho);
                self.pair_vars()
                    .find(|&v| x[v].is_one() && !node.frozen.contains_key(&v))
            }
            None => self.most_fractional(x),
        };
        if let Some(var) = branch_var {
            outcome.children = [Rational::zero(), Rational::one()]
                .into_iter()
                .map(|value| self.child(node, var, value))
                .collect();
        }
        Ok(outcome)
    }

    /// One representative per symmetric pair: `x_{pq}` with `var <= partner`.
    fn pair_vars(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.system.num_vars()).filter(|&v| {
            let (p, q) = self.system.pair(v);
            v <= self.system.var(q, p)
        })
    }

    fn most_fractional(&self, x: &[Rational]) -> Option<usize> {
        let half = Rational::new(1.into(), 2.into());
        let mut best: Option<(usize, Rational)> = None;
        for v in self.pair_vars() {
            if x[v].is_integer() {
                continue;
            }
            let distance = (&x[v] - &half).abs();
            if best.as_ref().is_none_or(|(_, d)| distance < *d) {
                best = Some((v, distance));
            }
        }
        best.map(|(v, _)| v)
    }

    fn child(&self, node: &Node, var: usize, value: Rational) -> Node {
        let (p, q) = self.system.pair(var);
        let mut frozen = node.frozen.clone();
        frozen.insert(self.system.var(q, p), value.clone());
        frozen.insert(var, value);
        Node { frozen }
    }

    pub fn floor(&self) -> &Rational {
        &self.floor
    }

    pub fn lattice(&self) -> &Lattice {
        self.lattice
    }
}

/// Collects node outcomes into a [`SearchReport`]; independent of the order
/// in which outcomes arrive.
#[derive(Debug, Clone, Default)]
pub struct Accumulator {
    found: BTreeSet<Orthocomplementation>,
    stats: SearchStats,
    root: Option<Relaxation>,
}

impl Accumulator {
    pub fn record(&mut self, node: &Node, outcome: &NodeOutcome) {
        self.stats.lp_solves += 1;
        self.stats.branch_nodes += 1;
        self.stats.pivots += outcome.pivots;
        if node.frozen.is_empty() {
            self.root = Some(outcome.relaxation.clone());
        }
        if let Relaxation::Optimal(value) = &outcome.relaxation {
            self.stats.note_relaxation(value);
        }
        if let Some(ortho) = &outcome.found {
            self.found.insert(ortho.clone());
        }
    }

    pub fn stats(&self) -> &SearchStats {
        &self.stats
    }

    /// Attaches the statistics gathered so far to an LP failure.
    pub fn with_stats(&self, error: SearchError) -> SearchError {
        match error {
            SearchError::Lp { source, .. } => SearchError::Lp {
                source,
                stats: self.stats.clone(),
            },
            other => other,
        }
    }

    pub fn finish(self, floor: &Rational) -> SearchReport {
        let orthos: Vec<Orthocomplementation> = self.found.into_iter().collect();
        let nonexistence = if orthos.is_empty() {
            Some(match self.root {
                Some(Relaxation::Optimal(v)) if v > *floor => NonexistenceCertificate::RootAboveFloor { optimum: v },
                Some(Relaxation::Optimal(v)) => NonexistenceCertificate::Exhausted { root_optimum: v },
                Some(Relaxation::Infeasible) | None => NonexistenceCertificate::RootInfeasible,
            })
        } else {
            None
        };
        SearchReport {
            method: Method::Lp,
            orthos,
            nonexistence,
            stats: self.stats,
        }
    }
}

/// Sequential branch-and-bound over the whole tree.
pub fn lp_orthos(lattice: &Lattice, objective: Objective, options: &LpOptions) -> Result<SearchReport, SearchError> {
    let search = LpSearch::new(lattice, objective, *options);
    let mut acc = Accumulator::default();
    let mut stack = vec![search.root()];
    while let Some(node) = stack.pop() {
        let outcome = search.expand(&node).map_err(|e| acc.with_stats(e))?;
        acc.record(&node, &outcome);
        stack.extend(outcome.children.into_iter().rev());
    }
    Ok(acc.finish(search.floor()))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CrossCheckError {
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("methods disagree: only lp {only_lp:?}, only brute {only_brute:?}")]
    Mismatch {
        only_lp: Vec<Vec<usize>>,
        only_brute: Vec<Vec<usize>>,
    },
    #[error("lift of {sigma:?} violates {family} row {row}")]
    NotMember {
        sigma: Vec<usize>,
        family: ConstraintFamily,
        row: usize,
    },
    #[error("lift of {sigma:?} is not recognised as an integer point")]
    NotIntegral { sigma: Vec<usize> },
    #[error("lift of {sigma:?} is not a vertex")]
    NotVertex { sigma: Vec<usize> },
    #[error("traces of {sigma:?} differ from n")]
    Trace { sigma: Vec<usize> },
    #[error("midpoint of {first:?} and {second:?}: {problem}")]
    Midpoint {
        first: Vec<usize>,
        second: Vec<usize>,
        problem: &'static str,
    },
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossCheckReport {
    pub lp: SearchReport,
    pub brute: SearchReport,
    pub midpoints_checked: usize,
}

/// Runs both methods and checks every claim that links them.
pub fn cross_check(
    lattice: &Lattice,
    objective: Objective,
    options: &LpOptions,
) -> Result<CrossCheckReport, CrossCheckError> {
    let lp = lp_orthos(lattice, objective, options)?;
    let brute = brute_force_orthos(lattice);
    compare_reports(&lp, &brute)?;
    let midpoints_checked = check_polytope_claims(lattice, &lp.orthos)?;
    Ok(CrossCheckReport {
        lp,
        brute,
        midpoints_checked,
    })
}

pub fn compare_reports(lp: &SearchReport, brute: &SearchReport) -> Result<(), CrossCheckError> {
    let a: BTreeSet<Vec<usize>> = lp.sigmas().into_iter().collect();
    let b: BTreeSet<Vec<usize>> = brute.sigmas().into_iter().collect();
    if a == b {
        Ok(())
    } else {
        Err(CrossCheckError::Mismatch {
            only_lp: a.difference(&b).cloned().collect(),
            only_brute: b.difference(&a).cloned().collect(),
        })
    }
}

/// Every orthocomplementation lifts to an integral member vertex with both
/// traces equal to `n`; every midpoint of two of them is a non-integral
/// member that is not a vertex. Returns the number of midpoints checked.
pub fn check_polytope_claims(lattice: &Lattice, orthos: &[Orthocomplementation]) -> Result<usize, CrossCheckError> {
    let system = ConstraintSystem::for_poset(lattice.poset());
    let n = Rational::from_integer(BigInt::from(lattice.len()));
    let mut points = Vec::with_capacity(orthos.len());
    for ortho in orthos {
        let sigma = ortho.sigma.clone();
        let lift = lift_permutation(&sigma).expect("verified permutation");
        let point = system.point_from_matrix(&lift, Some(Provenance::LiftedPermutation));
        if let Some((family, row)) = system.membership(&point)?.first_violation() {
            return Err(CrossCheckError::NotMember { sigma, family, row });
        }
        if system.is_integer_point(&point)?.as_deref() != Some(&sigma[..]) {
            return Err(CrossCheckError::NotIntegral { sigma });
        }
        if !system.is_vertex(&point)? {
            return Err(CrossCheckError::NotVertex { sigma });
        }
        let traces = (
            disjointness_trace(lattice.poset(), &lift).expect("square"),
            conjointness_trace(lattice.poset(), &lift).expect("square"),
        );
        if traces.0 != n
            || traces.1 != n
            || ortho.certificate.disjointness_trace != n
            || ortho.certificate.conjointness_trace != n
        {
            return Err(CrossCheckError::Trace { sigma });
        }
        points.push(point);
    }
    let mut checked = 0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let mid = points[i].midpoint(&points[j])?;
            let problem = if !system.membership(&mid)?.is_member() {
                Some("not a member")
            } else if system.is_integer_point(&mid)?.is_some() {
                Some("integral")
            } else if system.is_vertex(&mid)? {
                Some("is a vertex")
            } else {
                None
            };
            if let Some(problem) = problem {
                return Err(CrossCheckError::Midpoint {
                    first: orthos[i].sigma.clone(),
                    second: orthos[j].sigma.clone(),
                    problem,
                });
            }
            checked += 1;
        }
    }
    Ok(checked)
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
