//! Branch-and-bound with nodes expanded on a rayon pool.
//!
//! Each node's outcome depends only on the node, and the accumulator orders
//! its results, so the report is the same for any worker count.

use std::sync::Mutex;

use orthoforge_core::lp::LpOptions;
use orthoforge_core::search::{Accumulator, LpSearch, Node, SearchError, SearchReport};
use orthoforge_core::{lp_orthos, Lattice, Objective};

pub fn lp_orthos_parallel(
    lattice: &Lattice,
    objective: Objective,
    options: &LpOptions,
    workers: usize,
) -> Result<SearchReport, SearchError> {
    if workers <= 1 {
        return lp_orthos(lattice, objective, options);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    let search = LpSearch::new(lattice, objective, *options);
    let acc = Mutex::new(Accumulator::default());
    let result = pool.install(|| explore(&search, search.root(), &acc));
    let acc = acc.into_inner().expect("no worker panicked");
    match result {
        Ok(()) => Ok(acc.finish(search.floor())),
        Err(e) => Err(acc.with_stats(e)),
    }
}

fn explore(search: &LpSearch<'_>, node: Node, acc: &Mutex<Accumulator>) -> Result<(), SearchError> {
    let outcome = search.expand(&node)?;
    acc.lock().expect("no worker panicked").record(&node, &outcome);
    let mut children = outcome.children.into_iter();
    match (children.next(), children.next()) {
        (Some(a), Some(b)) => {
            let (ra, rb) = rayon::join(|| explore(search, a, acc), || explore(search, b, acc));
            ra.and(rb)
        }
        (Some(a), None) => explore(search, a, acc),
        _ => Ok(()),
    }
}
