//! Exact machinery for finding every orthocomplementation of a finite lattice.
//!
//! A finite lattice is embedded in the space of rational functions on its
//! elements. Orthocomplementations become the 0/1 points of a polytope cut
//! out by linear equalities (symmetry, unit row sums, commutation with the
//! zeta matrix and a trace condition), and are recovered as the integer
//! optimal solutions of a linear program. An independent backtracking search
//! over the lattice itself serves as the oracle for the LP route.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line and multi-threaded search live in the `orthoforge` crate.

#![no_std]
// Errors carry exact rationals and search statistics; they are rare and cheap
// enough to move.
#![allow(clippy::result_large_err)]

extern crate alloc;

pub mod generate;
pub mod incidence;
pub mod lattice;
pub mod linalg;
pub mod lp;
pub mod polytope;
pub mod rational;
pub mod search;

pub use generate::{generate, Family, GenerateError};
pub use incidence::{
    conjointness_trace, disjointness_trace, lift_permutation, linearized_join, linearized_meet, moebius_matrix,
    pointwise_product, zeta_matrix, AlgebraError, RationalMatrix, RationalVector, ZetaMoebiusPair,
};
pub use lattice::{BoundKind, Lattice, LatticeError, Poset, PosetSpec};
pub use lp::{LinearRow, LpError, LpOptions, LpProblem, LpSolution, LpStatus};
pub use polytope::{
    build_polytope, ConstraintFamily, ConstraintSystem, MembershipReport, PolytopeError, Provenance, RationalPoint,
};
pub use rational::Rational;
pub use search::{
    brute_force_orthos, cross_check, lp_orthos, verify_ortho, Certificate, CrossCheckError, CrossCheckReport, Method,
    NonexistenceCertificate, Objective, OrthoViolation, Orthocomplementation, SearchError, SearchReport, SearchStats,
};
