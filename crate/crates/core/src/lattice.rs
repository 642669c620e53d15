//! Finite posets given by their cover relation, and the lattices among them.
//!
//! Element indices always refer to the order in which elements were declared.
//! The linear extension used for matrix layouts is kept separately in
//! [`Poset::extension`].

use alloc::collections::BTreeMap;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Meet,
    Join,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundKind::Meet => f.write_str("meet"),
            BoundKind::Join => f.write_str("join"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("poset has no elements")]
    Empty,
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("cover ({lower}, {upper}) names undeclared element `{unknown}`")]
    UnknownLabel {
        lower: String,
        upper: String,
        unknown: String,
    },
    #[error("duplicate cover ({0}, {1})")]
    DuplicateCover(String, String),
    #[error("covers contain a cycle through `{0}`")]
    Cycle(String),
    #[error(
        "not a lattice: ({p}, {q}) has no {kind}: {} bounds {{{}}} have no {} element",
        match .kind { BoundKind::Meet => "lower", BoundKind::Join => "upper" },
        .bounds.join(", "),
        match .kind { BoundKind::Meet => "greatest", BoundKind::Join => "least" },
    )]
    NotALattice {
        p: String,
        q: String,
        kind: BoundKind,
        bounds: Vec<String>,
    },
    #[error("not a lattice: no least element")]
    NoBottom,
    #[error("not a lattice: no greatest element")]
    NoTop,
    #[error("element index {index} out of range for {n} elements")]
    IndexOutOfRange { index: usize, n: usize },
}

impl LatticeError {
    /// True for the errors that describe a well-formed poset that simply is
    /// not a lattice.
    pub fn is_not_a_lattice(&self) -> bool {
        matches!(
            self,
            LatticeError::NotALattice { .. } | LatticeError::NoBottom | LatticeError::NoTop
        )
    }
}

/// Elements and a normalized cover relation (a Hasse diagram).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PosetSpec {
    elements: Vec<String>,
    covers: Vec<(usize, usize)>,
    redundant: Vec<(usize, usize)>,
}

impl PosetSpec {
    /// Validates the labels and reduces the covers transitively.
    ///
    /// Covers implied by other covers are dropped and remembered; see
    /// [`PosetSpec::redundant_covers`].
    pub fn new<S, C>(elements: Vec<S>, covers: C) -> Result<Self, LatticeError>
    where
        S: Into<String>,
        C: IntoIterator<Item = (S, S)>,
    {
        let elements: Vec<String> = elements.into_iter().map(Into::into).collect();
        let mut index = BTreeMap::new();
        for (i, label) in elements.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(LatticeError::DuplicateElement(label.clone()));
            }
        }

        let mut pairs = Vec::new();
        let mut seen = BTreeSet::new();
        for (lower, upper) in covers {
            let (lower, upper): (String, String) = (lower.into(), upper.into());
            let lookup = |label: &String| {
                index.get(label).copied().ok_or_else(|| LatticeError::UnknownLabel {
                    lower: lower.clone(),
                    upper: upper.clone(),
                    unknown: label.clone(),
                })
            };
            let (a, b) = (lookup(&lower)?, lookup(&upper)?);
            if a == b {
                return Err(LatticeError::Cycle(lower));
            }
            if !seen.insert((a, b)) {
                return Err(LatticeError::DuplicateCover(lower, upper));
            }
            pairs.push((a, b));
        }

        let n = elements.len();
        let mut succ = vec![Vec::new(); n];
        for &(a, b) in &pairs {
            succ[a].push(b);
        }
        if let Some(v) = find_cycle(&succ) {
            return Err(LatticeError::Cycle(elements[v].clone()));
        }

        let reach = strict_reachability(&succ);
        let (covers, redundant) = pairs
            .into_iter()
            .partition(|&(a, b)| !succ[a].iter().any(|&c| c != b && reach[c * n + b]));
        Ok(PosetSpec {
            elements,
            covers,
            redundant,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    /// Cover pairs `(lower, upper)` as element indices.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    /// Covers that were given in the input but implied by the others.
    pub fn redundant_covers(&self) -> &[(usize, usize)] {
        &self.redundant
    }

    pub fn labeled_covers(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.covers
            .iter()
            .map(move |&(a, b)| (self.elements[a].as_str(), self.elements[b].as_str()))
    }

    /// The same poset with its elements listed in a different order.
    ///
    /// `order[k]` is the current index of the element placed at position `k`.
    pub fn reordered(&self, order: &[usize]) -> Self {
        let mut new_index = vec![0; order.len()];
        for (k, &old) in order.iter().enumerate() {
            new_index[old] = k;
        }
        let remap = |&(a, b): &(usize, usize)| (new_index[a], new_index[b]);
        PosetSpec {
            elements: order.iter().map(|&i| self.elements[i].clone()).collect(),
            covers: self.covers.iter().map(remap).collect(),
            redundant: self.redundant.iter().map(remap).collect(),
        }
    }

    /// Elements sorted by label (byte order), covers carried along.
    pub fn lex_ordered(&self) -> Self {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.elements[a].cmp(&self.elements[b]));
        self.reordered(&order)
    }
}

fn find_cycle(succ: &[Vec<usize>]) -> Option<usize> {
    let n = succ.len();
    let mut indegree = vec![0usize; n];
    for targets in succ {
        for &t in targets {
            indegree[t] += 1;
        }
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut visited = 0;
    while let Some(v) = stack.pop() {
        visited += 1;
        for &t in &succ[v] {
            indegree[t] -= 1;
            if indegree[t] == 0 {
                stack.push(t);
            }
        }
    }
    if visited == n {
        None
    } else {
        (0..n).find(|&v| indegree[v] > 0)
    }
}

/// `reach[a * n + b]` iff there is a path of length >= 1 from `a` to `b`.
fn strict_reachability(succ: &[Vec<usize>]) -> Vec<bool> {
    let n = succ.len();
    let mut reach = vec![false; n * n];
    for source in 0..n {
        let mut stack: Vec<usize> = succ[source].clone();
        while let Some(v) = stack.pop() {
            if !reach[source * n + v] {
                reach[source * n + v] = true;
                stack.extend_from_slice(&succ[v]);
            }
        }
    }
    reach
}

/// A finite partial order with its reflexive-transitive closure computed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    labels: Vec<String>,
    leq: Vec<bool>,
    covers: Vec<(usize, usize)>,
    extension: Vec<usize>,
    position: Vec<usize>,
}

impl Poset {
    pub fn new(spec: &PosetSpec) -> Self {
        let n = spec.len();
        let mut succ = vec![Vec::new(); n];
        for &(a, b) in spec.covers() {
            succ[a].push(b);
        }
        let mut leq = strict_reachability(&succ);
        for v in 0..n {
            leq[v * n + v] = true;
        }
        let extension = stable_topological_order(n, &succ);
        Self::from_parts(spec.elements().to_vec(), leq, spec.covers().to_vec(), extension)
    }

    fn from_parts(labels: Vec<String>, leq: Vec<bool>, covers: Vec<(usize, usize)>, extension: Vec<usize>) -> Self {
        let mut position = vec![0; labels.len()];
        for (k, &v) in extension.iter().enumerate() {
            position[v] = k;
        }
        Poset {
            labels,
            leq,
            covers,
            extension,
            position,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    #[inline]
    pub fn leq(&self, p: usize, q: usize) -> bool {
        self.leq[p * self.len() + q]
    }

    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    /// Linear extension: `extension()[k]` is the element at position `k`.
    /// Built by a topological sort that always emits the smallest available
    /// declared index, so it only depends on the declaration order.
    pub fn extension(&self) -> &[usize] {
        &self.extension
    }

    /// Inverse of [`Poset::extension`].
    pub fn position(&self, element: usize) -> usize {
        self.position[element]
    }

    /// The order dual. Indices and labels are kept; the extension is reversed.
    pub fn dual(&self) -> Poset {
        let n = self.len();
        let mut leq = vec![false; n * n];
        for p in 0..n {
            for q in 0..n {
                leq[q * n + p] = self.leq(p, q);
            }
        }
        let covers = self.covers.iter().map(|&(a, b)| (b, a)).collect();
        let extension = self.extension.iter().rev().copied().collect();
        Self::from_parts(self.labels.clone(), leq, covers, extension)
    }

    /// `counts[p * n + q]` = number of `r` with `r <= p` and `r <= q`.
    pub fn common_lower_counts(&self) -> Vec<u64> {
        let n = self.len();
        let mut counts = vec![0; n * n];
        for p in 0..n {
            for q in 0..n {
                counts[p * n + q] = (0..n).filter(|&r| self.leq(r, p) && self.leq(r, q)).count() as u64;
            }
        }
        counts
    }

    /// `counts[p * n + q]` = number of `r` with `p <= r` and `q <= r`.
    pub fn common_upper_counts(&self) -> Vec<u64> {
        self.dual().common_lower_counts()
    }

    fn lower_bounds(&self, p: usize, q: usize) -> Vec<usize> {
        (0..self.len()).filter(|&r| self.leq(r, p) && self.leq(r, q)).collect()
    }

    fn check_index(&self, index: usize) -> Result<(), LatticeError> {
        if index < self.len() {
            Ok(())
        } else {
            Err(LatticeError::IndexOutOfRange { index, n: self.len() })
        }
    }
}

fn stable_topological_order(n: usize, succ: &[Vec<usize>]) -> Vec<usize> {
    let mut indegree = vec![0usize; n];
    for targets in succ {
        for &t in targets {
            indegree[t] += 1;
        }
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = ready.pop_first() {
        order.push(v);
        for &t in &succ[v] {
            indegree[t] -= 1;
            if indegree[t] == 0 {
                ready.insert(t);
            }
        }
    }
    debug_assert_eq!(order.len(), n, "cover relation must be acyclic");
    order
}

/// A finite lattice: a poset with total meet and join tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    poset: Poset,
    meet: Vec<usize>,
    join: Vec<usize>,
    bottom: usize,
    top: usize,
}

impl Lattice {
    pub fn from_spec(spec: &PosetSpec) -> Result<Self, LatticeError> {
        Self::new(Poset::new(spec))
    }

    /// Validates the lattice axioms.
    ///
    /// Pairs whose common bounds exist but have no extremal element are
    /// reported first (all meets, then all joins, pairs in declaration
    /// order); a missing bottom or top is reported only after that.
    pub fn new(poset: Poset) -> Result<Self, LatticeError> {
        let n = poset.len();
        if n == 0 {
            return Err(LatticeError::Empty);
        }
        let dual = poset.dual();
        let mut meet = vec![usize::MAX; n * n];
        let mut join = vec![usize::MAX; n * n];
        for (kind, order, table) in [
            (BoundKind::Meet, &poset, &mut meet),
            (BoundKind::Join, &dual, &mut join),
        ] {
            for p in 0..n {
                for q in p..n {
                    let bounds = order.lower_bounds(p, q);
                    if bounds.is_empty() {
                        continue;
                    }
                    let greatest = bounds
                        .iter()
                        .copied()
                        .find(|&g| bounds.iter().all(|&r| order.leq(r, g)));
                    match greatest {
                        Some(g) => {
                            table[p * n + q] = g;
                            table[q * n + p] = g;
                        }
                        None => {
                            return Err(LatticeError::NotALattice {
                                p: poset.labels[p].clone(),
                                q: poset.labels[q].clone(),
                                kind,
                                bounds: bounds.iter().map(|&b| poset.labels[b].clone()).collect(),
                            })
                        }
                    }
                }
            }
        }
        let bottom = (0..n)
            .find(|&b| (0..n).all(|x| poset.leq(b, x)))
            .ok_or(LatticeError::NoBottom)?;
        let top = (0..n)
            .find(|&t| (0..n).all(|x| poset.leq(x, t)))
            .ok_or(LatticeError::NoTop)?;
        // With a bottom and a top every pair has bounds, so both tables are total.
        debug_assert!(meet.iter().chain(&join).all(|&v| v < n));
        Ok(Lattice {
            poset,
            meet,
            join,
            bottom,
            top,
        })
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn len(&self) -> usize {
        self.poset.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn label(&self, index: usize) -> &str {
        self.poset.label(index)
    }

    pub fn labels(&self) -> &[String] {
        self.poset.labels()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.poset.index_of(label)
    }

    #[inline]
    pub fn leq(&self, p: usize, q: usize) -> bool {
        self.poset.leq(p, q)
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn meet(&self, p: usize, q: usize) -> Result<usize, LatticeError> {
        self.poset.check_index(p)?;
        self.poset.check_index(q)?;
        Ok(self.meet_unchecked(p, q))
    }

    pub fn join(&self, p: usize, q: usize) -> Result<usize, LatticeError> {
        self.poset.check_index(p)?;
        self.poset.check_index(q)?;
        Ok(self.join_unchecked(p, q))
    }

    /// Table lookup; panics on out-of-range indices.
    #[inline]
    pub fn meet_unchecked(&self, p: usize, q: usize) -> usize {
        self.meet[p * self.len() + q]
    }

    #[inline]
    pub fn join_unchecked(&self, p: usize, q: usize) -> usize {
        self.join[p * self.len() + q]
    }

    pub fn dual(&self) -> Lattice {
        Lattice {
            poset: self.poset.dual(),
            meet: self.join.clone(),
            join: self.meet.clone(),
            bottom: self.top,
            top: self.bottom,
        }
    }
}
