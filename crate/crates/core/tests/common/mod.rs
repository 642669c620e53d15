#![allow(dead_code)]

use orthoforge_core::{generate, Family, Lattice, PosetSpec};
use proptest::prelude::*;

pub struct Named {
    pub name: &'static str,
    pub lattice: Lattice,
}

fn build(family: Family, k: Option<usize>) -> Lattice {
    Lattice::from_spec(&generate(family, k).unwrap()).unwrap()
}

pub fn corpus() -> Vec<Named> {
    let mut out = Vec::new();
    let chains = ["C_1", "C_2", "C_3", "C_4", "C_5", "C_6"];
    for (k, name) in chains.into_iter().enumerate() {
        out.push(Named {
            name,
            lattice: build(Family::Chain, Some(k + 1)),
        });
    }
    for (k, name) in [(2, "B_2"), (3, "B_3"), (4, "B_4")] {
        out.push(Named {
            name,
            lattice: build(Family::Boolean, Some(k)),
        });
    }
    for (k, name) in [(3, "M_3"), (4, "M_4"), (5, "M_5")] {
        out.push(Named {
            name,
            lattice: build(Family::M, Some(k)),
        });
    }
    out.push(Named {
        name: "N_5",
        lattice: build(Family::N5, None),
    });
    for (k, name) in [(1, "MO_1"), (2, "MO_2"), (3, "MO_3")] {
        out.push(Named {
            name,
            lattice: build(Family::Mo, Some(k)),
        });
    }
    out.push(Named {
        name: "hexagon",
        lattice: build(Family::Hexagon, None),
    });
    out
}

pub fn bowtie() -> PosetSpec {
    PosetSpec::new(
        vec!["a", "b", "x", "y"],
        vec![("a", "x"), ("a", "y"), ("b", "x"), ("b", "y")],
    )
    .unwrap()
}

/// The subsets of `{0..bits}` in `seed`, closed under intersection, with the
/// full set added: always a lattice under inclusion. Declaration order is
/// shuffled by `shuffle`.
pub fn meet_closed_lattice(bits: usize, seed: &[usize], shuffle: u64) -> PosetSpec {
    let full = (1usize << bits) - 1;
    let mut sets: Vec<usize> = seed.iter().map(|s| s & full).collect();
    sets.push(full);
    sets.sort_unstable();
    sets.dedup();
    loop {
        let mut grown = sets.clone();
        for &a in &sets {
            for &b in &sets {
                grown.push(a & b);
            }
        }
        grown.sort_unstable();
        grown.dedup();
        if grown.len() == sets.len() {
            break;
        }
        sets = grown;
    }
    // Deterministic shuffle of the declaration order.
    let mut order: Vec<usize> = (0..sets.len()).collect();
    let mut state = shuffle | 1;
    for i in (1..order.len()).rev() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        order.swap(i, (state % (i as u64 + 1)) as usize);
    }
    let label = |s: usize| format!("s{s}");
    let elements: Vec<String> = order.iter().map(|&i| label(sets[i])).collect();
    let mut covers = Vec::new();
    for &a in &sets {
        for &b in &sets {
            let covered = a != b && a & b == a && !sets.iter().any(|&c| c != a && c != b && a & c == a && c & b == c);
            if covered {
                covers.push((label(a), label(b)));
            }
        }
    }
    PosetSpec::new(elements, covers).unwrap()
}

pub fn small_lattice(bits: usize) -> impl Strategy<Value = PosetSpec> {
    (proptest::collection::vec(0usize..1 << bits, 0..6), any::<u64>())
        .prop_map(move |(seed, shuffle)| meet_closed_lattice(bits, &seed, shuffle))
}

/// Random DAG on `n` nodes: edges only from lower to higher index, then
/// relabelled so that declaration order is arbitrary.
pub fn random_dag() -> impl Strategy<Value = (Vec<String>, Vec<(String, String)>)> {
    (1usize..8).prop_flat_map(|n| {
        (
            proptest::collection::vec(any::<bool>(), n * n),
            Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
        )
            .prop_map(move |(edges, perm)| {
                let label = |i: usize| format!("e{}", perm[i]);
                let elements = (0..n).map(label).collect();
                let mut covers = Vec::new();
                for i in 0..n {
                    for j in i + 1..n {
                        if edges[i * n + j] {
                            covers.push((label(i), label(j)));
                        }
                    }
                }
                (elements, covers)
            })
    })
}

/// Orthocomplementations by trying every permutation: bijective by
/// construction, then each defining condition checked literally.
pub fn naive_orthos(lattice: &Lattice) -> Vec<Vec<usize>> {
    naive_search(lattice, true)
}

/// As [`naive_orthos`], optionally without the conjointness condition.
pub fn naive_search(lattice: &Lattice, conjoint: bool) -> Vec<Vec<usize>> {
    fn permute(
        k: usize,
        current: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
        lattice: &Lattice,
        conjoint: bool,
    ) {
        let n = used.len();
        if k == n {
            let s = &current[..];
            let ok = (0..n).all(|p| s[s[p]] == p)
                && (0..n).all(|p| {
                    lattice.meet_unchecked(p, s[p]) == lattice.bottom()
                        && (!conjoint || lattice.join_unchecked(p, s[p]) == lattice.top())
                })
                && (0..n).all(|p| (0..n).all(|q| !lattice.leq(p, q) || lattice.leq(s[q], s[p])));
            if ok {
                out.push(current.clone());
            }
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                current.push(v);
                permute(k + 1, current, used, out, lattice, conjoint);
                current.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    permute(
        0,
        &mut Vec::new(),
        &mut vec![false; lattice.len()],
        &mut out,
        lattice,
        conjoint,
    );
    out
}
