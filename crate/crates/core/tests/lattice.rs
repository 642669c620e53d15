mod common;

use common::{bowtie, corpus, meet_closed_lattice, random_dag, small_lattice};
use orthoforge_core::{BoundKind, Lattice, LatticeError, Poset, PosetSpec};
use proptest::prelude::*;

/// Reachability along declared covers, by depth-first search.
fn reachable(n: usize, covers: &[(usize, usize)], from: usize) -> Vec<bool> {
    let mut seen = vec![false; n];
    let mut stack = vec![from];
    while let Some(p) = stack.pop() {
        if !std::mem::replace(&mut seen[p], true) {
            stack.extend(covers.iter().filter(|(a, _)| *a == p).map(|(_, b)| *b));
        }
    }
    seen
}

fn index_covers(elements: &[String], covers: &[(String, String)]) -> Vec<(usize, usize)> {
    let idx = |l: &String| elements.iter().position(|e| e == l).unwrap();
    covers.iter().map(|(a, b)| (idx(a), idx(b))).collect()
}

fn check_laws(l: &Lattice) {
    let n = l.len();
    for a in 0..n {
        assert_eq!(l.meet_unchecked(a, a), a);
        assert_eq!(l.join_unchecked(a, a), a);
        assert_eq!(l.meet_unchecked(a, l.bottom()), l.bottom());
        assert_eq!(l.join_unchecked(a, l.top()), l.top());
        for b in 0..n {
            let m = l.meet_unchecked(a, b);
            let j = l.join_unchecked(a, b);
            assert_eq!(m, l.meet_unchecked(b, a));
            assert_eq!(j, l.join_unchecked(b, a));
            assert_eq!(l.meet_unchecked(a, j), a, "absorption");
            assert_eq!(l.join_unchecked(a, m), a, "absorption");
            assert_eq!(l.leq(a, b), m == a);
            assert_eq!(l.leq(a, b), j == b);
            // Greatest lower bound, by inspection of every element.
            assert!(l.leq(m, a) && l.leq(m, b));
            assert!((0..n).all(|z| !(l.leq(z, a) && l.leq(z, b)) || l.leq(z, m)));
            for c in 0..n {
                assert_eq!(l.meet_unchecked(m, c), l.meet_unchecked(a, l.meet_unchecked(b, c)));
                assert_eq!(l.join_unchecked(j, c), l.join_unchecked(a, l.join_unchecked(b, c)));
            }
        }
    }
}

fn check_extension(poset: &Poset) {
    let n = poset.len();
    let ext = poset.extension();
    let mut sorted = ext.to_vec();
    sorted.sort_unstable();
    assert_eq!(sorted, (0..n).collect::<Vec<_>>());
    for p in 0..n {
        assert_eq!(ext[poset.position(p)], p);
        for q in 0..n {
            if p != q && poset.leq(p, q) {
                assert!(poset.position(p) < poset.position(q));
            }
        }
    }
}

#[test]
fn corpus_obeys_lattice_laws() {
    for entry in corpus() {
        check_laws(&entry.lattice);
        check_laws(&entry.lattice.dual());
        check_extension(entry.lattice.poset());
    }
}

#[test]
fn dual_swaps_meet_and_join() {
    for entry in corpus() {
        let l = &entry.lattice;
        let d = l.dual();
        assert_eq!(d.bottom(), l.top());
        assert_eq!(d.top(), l.bottom());
        for a in 0..l.len() {
            for b in 0..l.len() {
                assert_eq!(d.leq(a, b), l.leq(b, a));
                assert_eq!(d.meet_unchecked(a, b), l.join_unchecked(a, b));
            }
        }
    }
}

#[test]
fn corpus_sizes() {
    let sizes: Vec<(&str, usize)> = corpus().iter().map(|e| (e.name, e.lattice.len())).collect();
    let expected = [
        ("C_1", 1),
        ("C_2", 2),
        ("C_3", 3),
        ("C_4", 4),
        ("C_5", 5),
        ("C_6", 6),
        ("B_2", 4),
        ("B_3", 8),
        ("B_4", 16),
        ("M_3", 5),
        ("M_4", 6),
        ("M_5", 7),
        ("N_5", 5),
        ("MO_1", 4),
        ("MO_2", 6),
        ("MO_3", 8),
        ("hexagon", 6),
    ];
    assert_eq!(sizes, expected);
}

#[test]
fn bowtie_is_a_poset_but_not_a_lattice() {
    let err = Lattice::from_spec(&bowtie()).unwrap_err();
    match &err {
        LatticeError::NotALattice { p, q, kind, bounds } => {
            assert_eq!((p.as_str(), q.as_str(), *kind), ("x", "y", BoundKind::Meet));
            assert_eq!(bounds, &vec!["a".to_string(), "b".to_string()]);
        }
        other => panic!("{other:?}"),
    }
    assert!(err.is_not_a_lattice());
}

#[test]
fn missing_extremes() {
    // Two minimal elements under a common top: every pair has a join, but the
    // meet of the minimal elements has no lower bounds at all.
    let v = PosetSpec::new(vec!["a", "b", "1"], vec![("a", "1"), ("b", "1")]).unwrap();
    assert_eq!(Lattice::from_spec(&v).unwrap_err(), LatticeError::NoBottom);
    let wedge = PosetSpec::new(vec!["0", "a", "b"], vec![("0", "a"), ("0", "b")]).unwrap();
    assert_eq!(Lattice::from_spec(&wedge).unwrap_err(), LatticeError::NoTop);
}

#[test]
fn declaration_order_breaks_ties_only() {
    let a = PosetSpec::new(
        vec!["0", "a", "b", "1"],
        vec![("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")],
    )
    .unwrap();
    let b = PosetSpec::new(
        vec!["1", "b", "a", "0"],
        vec![("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")],
    )
    .unwrap();
    let labels = |s: &PosetSpec| {
        let p = Poset::new(s);
        p.extension()
            .iter()
            .map(|&i| p.label(i).to_string())
            .collect::<Vec<_>>()
    };
    assert_eq!(labels(&a), ["0", "a", "b", "1"]);
    assert_eq!(labels(&b), ["0", "b", "a", "1"]);
}

proptest! {
    #[test]
    fn order_is_the_reflexive_transitive_closure((elements, covers) in random_dag()) {
        let spec = PosetSpec::new(elements.clone(), covers.clone()).unwrap();
        let poset = Poset::new(&spec);
        let raw = index_covers(&elements, &covers);
        let n = elements.len();
        for p in 0..n {
            let seen = reachable(n, &raw, p);
            for (q, &reached) in seen.iter().enumerate() {
                prop_assert_eq!(poset.leq(p, q), reached);
            }
        }
        // Kept covers are exactly the pairs with nothing strictly between.
        for p in 0..n {
            for q in 0..n {
                let between = (0..n).any(|r| r != p && r != q && poset.leq(p, r) && poset.leq(r, q));
                let is_cover = p != q && poset.leq(p, q) && !between;
                prop_assert_eq!(spec.covers().contains(&(p, q)), is_cover);
            }
        }
        prop_assert_eq!(spec.covers().len() + spec.redundant_covers().len(), covers.len());
        check_extension(&poset);
    }

    #[test]
    fn a_dag_is_a_lattice_iff_every_pair_has_bounds((elements, covers) in random_dag()) {
        let spec = PosetSpec::new(elements, covers).unwrap();
        let poset = Poset::new(&spec);
        let n = poset.len();
        let extremum = |p: usize, q: usize, below: bool| {
            let bounds: Vec<usize> = (0..n)
                .filter(|&z| if below { poset.leq(z, p) && poset.leq(z, q) } else { poset.leq(p, z) && poset.leq(q, z) })
                .collect();
            bounds.iter().copied().find(|&m| {
                bounds.iter().all(|&z| if below { poset.leq(z, m) } else { poset.leq(m, z) })
            })
        };
        let expected = (0..n).all(|p| (0..n).all(|q| extremum(p, q, true).is_some() && extremum(p, q, false).is_some()));
        let built = Lattice::new(poset.clone());
        prop_assert_eq!(built.is_ok(), expected);
        if let Ok(l) = built {
            for p in 0..n {
                for q in 0..n {
                    prop_assert_eq!(Some(l.meet_unchecked(p, q)), extremum(p, q, true));
                    prop_assert_eq!(Some(l.join_unchecked(p, q)), extremum(p, q, false));
                }
            }
        }
    }

    #[test]
    fn meet_closed_families_are_lattices(spec in small_lattice(4)) {
        let l = Lattice::from_spec(&spec).unwrap();
        check_laws(&l);
        check_extension(l.poset());
    }

    #[test]
    fn reordering_preserves_the_order(spec in small_lattice(3)) {
        let lex = spec.lex_ordered();
        let (p, q) = (Poset::new(&spec), Poset::new(&lex));
        for a in spec.elements() {
            for b in spec.elements() {
                let (i, j) = (p.index_of(a).unwrap(), p.index_of(b).unwrap());
                let (x, y) = (q.index_of(a).unwrap(), q.index_of(b).unwrap());
                prop_assert_eq!(p.leq(i, j), q.leq(x, y));
            }
        }
    }
}

#[test]
fn meet_closed_generator_sanity() {
    // All subsets of a 2-set: B_2.
    let spec = meet_closed_lattice(2, &[0, 1, 2], 7);
    assert_eq!(spec.len(), 4);
    assert_eq!(spec.covers().len(), 4);
}
