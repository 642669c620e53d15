mod common;

use std::collections::BTreeSet;

use common::{corpus, naive_orthos, naive_search, small_lattice};
use orthoforge_core::lp::LpOptions;
use orthoforge_core::rational::int;
use orthoforge_core::search::{LpSearch, Relaxation};
use orthoforge_core::{
    brute_force_orthos, cross_check, lift_permutation, lp_orthos, verify_ortho, Lattice, NonexistenceCertificate,
    Objective, OrthoViolation, PosetSpec,
};
use proptest::prelude::*;

/// Counts frozen from the all-permutations oracle (and, for B_4, from the
/// backtracking oracle, since 16! permutations are out of reach).
const COUNTS: [(&str, usize); 17] = [
    ("C_1", 1),
    ("C_2", 1),
    ("C_3", 0),
    ("C_4", 0),
    ("C_5", 0),
    ("C_6", 0),
    ("B_2", 1),
    ("B_3", 1),
    ("B_4", 1),
    ("M_3", 0),
    ("M_4", 3),
    ("M_5", 0),
    ("N_5", 0),
    ("MO_1", 1),
    ("MO_2", 3),
    ("MO_3", 15),
    ("hexagon", 1),
];

fn sorted(sigmas: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    let set: BTreeSet<Vec<usize>> = sigmas.into_iter().collect();
    set.into_iter().collect()
}

#[test]
fn backtracking_matches_all_permutations() {
    for entry in corpus().into_iter().filter(|e| e.lattice.len() <= 8) {
        let naive = sorted(naive_orthos(&entry.lattice));
        assert_eq!(brute_force_orthos(&entry.lattice).sigmas(), naive, "{}", entry.name);
    }
}

#[test]
fn disjoint_order_reversing_involutions_are_conjoint() {
    for entry in corpus().into_iter().filter(|e| e.lattice.len() <= 8) {
        assert_eq!(
            naive_search(&entry.lattice, false),
            naive_orthos(&entry.lattice),
            "{}",
            entry.name
        );
    }
}

#[test]
fn frozen_counts() {
    for (entry, (name, count)) in corpus().iter().zip(COUNTS) {
        assert_eq!(entry.name, name);
        assert_eq!(brute_force_orthos(&entry.lattice).orthos.len(), count, "{name}");
        if entry.lattice.len() <= 8 {
            assert_eq!(naive_orthos(&entry.lattice).len(), count, "{name}");
        }
    }
}

#[test]
fn four_atom_lattice_is_mo2() {
    // M_4 and MO_2 are the same lattice: bottom, four pairwise incomparable
    // atoms, top. Any pairing of the atoms is an orthocomplementation.
    let c = corpus();
    let m4 = &c.iter().find(|e| e.name == "M_4").unwrap().lattice;
    let mo2 = &c.iter().find(|e| e.name == "MO_2").unwrap().lattice;
    assert_eq!(m4.len(), mo2.len());
    for l in [m4, mo2] {
        let atoms: Vec<usize> = (0..l.len()).filter(|&p| p != l.bottom() && p != l.top()).collect();
        assert_eq!(atoms.len(), 4);
        for &a in &atoms {
            for &b in &atoms {
                assert_eq!(a == b, l.leq(a, b));
            }
        }
    }
}

#[test]
fn cross_check_on_the_corpus_under_both_objectives() {
    for entry in corpus() {
        for objective in [Objective::Conjoint, Objective::Disjoint] {
            let report = cross_check(&entry.lattice, objective, &LpOptions::default())
                .unwrap_or_else(|e| panic!("{} {objective}: {e}", entry.name));
            let k = report.lp.orthos.len();
            assert_eq!(report.midpoints_checked, k * k.saturating_sub(1) / 2);
            assert_eq!(report.lp.nonexistence.is_some(), k == 0);
            let n = int(entry.lattice.len() as i64);
            if let Some(min) = &report.lp.stats.min_relaxation {
                assert!(*min >= n, "{}: {min}", entry.name);
            }
        }
    }
}

#[test]
fn nonexistence_certificates() {
    let c = corpus();
    for name in ["C_3", "M_3", "N_5"] {
        let l = &c.iter().find(|e| e.name == name).unwrap().lattice;
        let report = lp_orthos(l, Objective::Conjoint, &LpOptions::default()).unwrap();
        assert!(report.orthos.is_empty());
        match report.nonexistence.expect("certificate") {
            NonexistenceCertificate::RootAboveFloor { optimum } => assert!(optimum > int(l.len() as i64)),
            NonexistenceCertificate::Exhausted { root_optimum } => assert_eq!(root_optimum, int(l.len() as i64)),
            NonexistenceCertificate::RootInfeasible => {}
        }
    }
}

#[test]
fn odd_chain_root_sits_above_the_floor() {
    // The order reversal of C_3 fixes the middle element, so it is no
    // orthocomplementation; its lift still meets every row but the trace
    // row, with upper trace 1 + 2 + 1 = 4.
    let c = corpus();
    let l = &c.iter().find(|e| e.name == "C_3").unwrap().lattice;
    let search = LpSearch::new(l, Objective::Conjoint, LpOptions::default());
    let reversal = lift_permutation(&[2, 1, 0]).unwrap();
    let point = search.system().point_from_matrix(&reversal, None);
    assert!(search
        .problem()
        .rows
        .iter()
        .all(|r| r.residual(&point.coords) == int(0)));
    assert_eq!(search.problem().objective(&point.coords), int(4));
    let outcome = search.expand(&search.root()).unwrap();
    assert_eq!(outcome.relaxation, Relaxation::Optimal(int(4)));
    assert!(outcome.found.is_none() && outcome.children.is_empty());
}

#[test]
fn verify_examples() {
    let c = corpus();
    let b3 = &c.iter().find(|e| e.name == "B_3").unwrap().lattice;
    let complement: Vec<usize> = (0..8)
        .map(|p| {
            let bits = b3.label(p);
            let flipped: String = bits.chars().map(|ch| if ch == '0' { '1' } else { '0' }).collect();
            b3.index_of(&flipped).unwrap()
        })
        .collect();
    let ortho = verify_ortho(b3, &complement).unwrap();
    assert_eq!(ortho.certificate.disjointness_trace, int(8));
    assert_eq!(ortho.certificate.conjointness_trace, int(8));

    let b2 = Lattice::from_spec(
        &PosetSpec::new(
            vec!["0", "a", "b", "1"],
            vec![("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")],
        )
        .unwrap(),
    )
    .unwrap();
    let err = verify_ortho(&b2, &[0, 1, 2, 3]).unwrap_err();
    assert_eq!(err.condition(), "disjointness");
    assert_eq!(err.witness(), Some((1, 1)));

    // Bijective but not an involution: a 3-cycle on three atoms of MO_2.
    let mo2 = &c.iter().find(|e| e.name == "MO_2").unwrap().lattice;
    let idx = |s: &str| mo2.index_of(s).unwrap();
    let mut sigma = vec![0; 6];
    for (from, to) in [
        ("0", "1"),
        ("1", "0"),
        ("a1", "a2"),
        ("a2", "b1"),
        ("b1", "a1"),
        ("b2", "b2"),
    ] {
        sigma[idx(from)] = idx(to);
    }
    assert_eq!(verify_ortho(mo2, &sigma).unwrap_err().condition(), "involution");
    assert!(matches!(
        verify_ortho(mo2, &[0, 0, 1, 2, 3, 4]),
        Err(OrthoViolation::NotABijection { .. })
    ));
    assert!(matches!(
        verify_ortho(mo2, &[0]),
        Err(OrthoViolation::NotABijection { .. })
    ));
}

#[test]
fn search_is_deterministic() {
    let c = corpus();
    let l = &c.iter().find(|e| e.name == "MO_3").unwrap().lattice;
    let first = lp_orthos(l, Objective::Conjoint, &LpOptions::default()).unwrap();
    for _ in 0..2 {
        assert_eq!(lp_orthos(l, Objective::Conjoint, &LpOptions::default()).unwrap(), first);
    }
}

#[test]
fn pivot_cap_surfaces_with_partial_stats() {
    let c = corpus();
    let l = &c.iter().find(|e| e.name == "B_3").unwrap().lattice;
    let err = lp_orthos(
        l,
        Objective::Conjoint,
        &LpOptions {
            pivot_cap: 0,
            presolve: true,
        },
    )
    .unwrap_err();
    assert!(err.is_resource_limit());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn lp_matches_oracle_on_random_lattices(spec in small_lattice(3), lex in any::<bool>()) {
        let spec: PosetSpec = if lex { spec.lex_ordered() } else { spec };
        let lattice = Lattice::from_spec(&spec).unwrap();
        let naive = sorted(naive_orthos(&lattice));
        prop_assert_eq!(sorted(naive_search(&lattice, false)), naive.clone());
        prop_assert_eq!(brute_force_orthos(&lattice).sigmas(), naive.clone());
        for objective in [Objective::Conjoint, Objective::Disjoint] {
            let report = lp_orthos(&lattice, objective, &LpOptions::default()).unwrap();
            prop_assert_eq!(report.sigmas(), naive.clone());
            for o in &report.orthos {
                prop_assert_eq!(verify_ortho(&lattice, &o.sigma).unwrap(), o.clone());
            }
        }
    }
}
