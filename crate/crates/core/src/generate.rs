//! Named families of small lattices used as a test corpus.
//!
//! | family    | size `k`            | labels                                          |
//! |-----------|---------------------|-------------------------------------------------|
//! | `chain`   | 1..=64 elements     | `0`, `m` (k = 3) or `m1`..`m{k-2}`, `1`          |
//! | `boolean` | 1..=6 generators    | characteristic bitstrings of width `k`          |
//! | `m`       | 1..=32 atoms        | `0`, `a1`..`ak`, `1`                            |
//! | `mo`      | 1..=16 atom pairs   | `0`, `a1`..`ak`, `b1`..`bk`, `1`                |
//! | `n5`      | fixed (5 elements)  | `0`, `a`, `b`, `c`, `1` with 0<a<b<1, 0<c<1      |
//! | `hexagon` | fixed (6 elements)  | `0`, `a`, `b`, `c`, `d`, `1` with 0<a<b<1, 0<c<d<1 |
//!
//! Chains with two or more elements always use `0` and `1` for the ends; the
//! one-element chain is just `0`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::lattice::PosetSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Chain,
    Boolean,
    /// `M_k`: `k` pairwise incomparable atoms between a bottom and a top.
    M,
    /// `MO_k`: `2k` atoms between a bottom and a top.
    Mo,
    N5,
    Hexagon,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenerateError {
    #[error("unknown family `{0}` (expected chain, boolean, m, mo, n5 or hexagon)")]
    UnknownFamily(String),
    #[error("size {size} out of range for family {family} (allowed {min}..={max})")]
    SizeOutOfRange {
        family: Family,
        size: usize,
        min: usize,
        max: usize,
    },
    #[error("family {0} needs a size")]
    MissingSize(Family),
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Chain,
        Family::Boolean,
        Family::M,
        Family::Mo,
        Family::N5,
        Family::Hexagon,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Chain => "chain",
            Family::Boolean => "boolean",
            Family::M => "m",
            Family::Mo => "mo",
            Family::N5 => "n5",
            Family::Hexagon => "hexagon",
        }
    }

    /// Inclusive size limits. Fixed families report their element count.
    pub fn size_range(self) -> (usize, usize) {
        match self {
            Family::Chain => (1, 64),
            Family::Boolean => (1, 6),
            Family::M => (1, 32),
            Family::Mo => (1, 16),
            Family::N5 => (5, 5),
            Family::Hexagon => (6, 6),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = GenerateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| GenerateError::UnknownFamily(s.into()))
    }
}

/// Builds the canonical cover relation of a family member.
///
/// `size` may be omitted for `n5` and `hexagon`; if given it must equal the
/// element count.
pub fn generate(family: Family, size: Option<usize>) -> Result<PosetSpec, GenerateError> {
    let (min, max) = family.size_range();
    let k = match (size, min == max) {
        (Some(k), _) => k,
        (None, true) => min,
        (None, false) => return Err(GenerateError::MissingSize(family)),
    };
    if !(min..=max).contains(&k) {
        return Err(GenerateError::SizeOutOfRange {
            family,
            size: k,
            min,
            max,
        });
    }

    let (elements, covers): (Vec<String>, Vec<(String, String)>) = match family {
        Family::Chain => {
            let middle: Vec<String> = match k {
                1 | 2 => Vec::new(),
                3 => alloc::vec!["m".into()],
                _ => (1..=k - 2).map(|i| format!("m{i}")).collect(),
            };
            let mut elements = alloc::vec![String::from("0")];
            elements.extend(middle);
            if k >= 2 {
                elements.push("1".into());
            }
            let covers = elements.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
            (elements, covers)
        }
        Family::Boolean => {
            let label = |set: usize| format!("{set:0k$b}");
            let elements = (0..1usize << k).map(label).collect();
            let mut covers = Vec::new();
            for set in 0..1usize << k {
                for bit in 0..k {
                    if set & (1 << bit) == 0 {
                        covers.push((label(set), label(set | 1 << bit)));
                    }
                }
            }
            (elements, covers)
        }
        Family::M => {
            let atoms: Vec<String> = (1..=k).map(|i| format!("a{i}")).collect();
            bounded(atoms)
        }
        Family::Mo => {
            let atoms: Vec<String> = (1..=k)
                .map(|i| format!("a{i}"))
                .chain((1..=k).map(|i| format!("b{i}")))
                .collect();
            bounded(atoms)
        }
        Family::N5 => labelled(
            &["0", "a", "b", "c", "1"],
            &[("0", "a"), ("a", "b"), ("b", "1"), ("0", "c"), ("c", "1")],
        ),
        Family::Hexagon => labelled(
            &["0", "a", "b", "c", "d", "1"],
            &[("0", "a"), ("a", "b"), ("b", "1"), ("0", "c"), ("c", "d"), ("d", "1")],
        ),
    };
    Ok(PosetSpec::new(elements, covers).expect("generated families are valid posets"))
}

/// Bottom, the given pairwise incomparable atoms, top.
fn bounded(atoms: Vec<String>) -> (Vec<String>, Vec<(String, String)>) {
    let mut covers = Vec::new();
    for atom in &atoms {
        covers.push(("0".into(), atom.clone()));
    }
    for atom in &atoms {
        covers.push((atom.clone(), "1".into()));
    }
    let mut elements = alloc::vec![String::from("0")];
    elements.extend(atoms);
    elements.push("1".into());
    (elements, covers)
}

fn labelled(elements: &[&str], covers: &[(&str, &str)]) -> (Vec<String>, Vec<(String, String)>) {
    (
        elements.iter().map(|&s| s.into()).collect(),
        covers.iter().map(|&(a, b)| (a.into(), b.into())).collect(),
    )
}
