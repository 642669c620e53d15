//! JSON file formats: lattice files, orthocomplementation maps, matrix,
//! polytope and report dumps. Rationals are always strings.

use std::fmt::Write as _;

use orthoforge_core::lattice::{Lattice, LatticeError, Poset, PosetSpec};
use orthoforge_core::lp::{LinearRow, LpProblem};
use orthoforge_core::polytope::ConstraintSystem;
use orthoforge_core::rational::{parse_exact, to_exact_string, Rational};
use orthoforge_core::search::{
    Certificate, NonexistenceCertificate, OrthoViolation, Orthocomplementation, SearchReport, SearchStats,
};
use orthoforge_core::{RationalMatrix, RationalVector};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Poset(#[from] LatticeError),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("map has no entry for `{0}`")]
    MissingLabel(String),
    #[error("`{0}` is not an exact rational")]
    BadRational(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
}

/// `{"elements": [...], "covers": [[lower, upper], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeFile {
    pub elements: Vec<String>,
    pub covers: Vec<(String, String)>,
}

pub fn parse_poset(text: &str) -> Result<PosetSpec, FormatError> {
    let file: LatticeFile = serde_json::from_str(text)?;
    Ok(PosetSpec::new(file.elements, file.covers)?)
}

fn quote(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

/// Canonical text of a lattice file: one line for elements, one for covers.
pub fn dump_poset(spec: &PosetSpec) -> String {
    let elements: Vec<String> = spec.elements().iter().map(|e| quote(e)).collect();
    let covers: Vec<String> = spec
        .labeled_covers()
        .map(|(a, b)| format!("[{}, {}]", quote(a), quote(b)))
        .collect();
    format!(
        "{{\n  \"elements\": [{}],\n  \"covers\": [{}]\n}}\n",
        elements.join(", "),
        covers.join(", ")
    )
}

/// `{"label": "image", ...}` to a permutation in element indices. Every
/// element needs an entry; images may repeat (the verifier reports it).
pub fn parse_map(text: &str, lattice: &Lattice) -> Result<Vec<usize>, FormatError> {
    let raw: Map<String, Value> = serde_json::from_str(text)?;
    let mut sigma = vec![usize::MAX; lattice.len()];
    for (from, to) in &raw {
        let to = to.as_str().ok_or_else(|| FormatError::UnknownLabel(to.to_string()))?;
        let p = lattice
            .index_of(from)
            .ok_or_else(|| FormatError::UnknownLabel(from.clone()))?;
        let q = lattice
            .index_of(to)
            .ok_or_else(|| FormatError::UnknownLabel(to.into()))?;
        sigma[p] = q;
    }
    if let Some(p) = sigma.iter().position(|&q| q == usize::MAX) {
        return Err(FormatError::MissingLabel(lattice.label(p).into()));
    }
    Ok(sigma)
}

pub fn map_value(lattice: &Lattice, sigma: &[usize]) -> Value {
    let mut map = Map::new();
    for (p, &q) in sigma.iter().enumerate() {
        map.insert(lattice.label(p).into(), Value::String(lattice.label(q).into()));
    }
    Value::Object(map)
}

fn exact(value: &Rational) -> Value {
    Value::String(to_exact_string(value))
}

/// Entries laid out in the linear extension.
pub fn matrix_json(poset: &Poset, matrix: &RationalMatrix) -> Value {
    let order = poset.extension();
    Value::Array(
        order
            .iter()
            .map(|&r| Value::Array(order.iter().map(|&c| exact(matrix.get(r, c))).collect()))
            .collect(),
    )
}

pub fn matrix_text(poset: &Poset, matrix: &RationalMatrix) -> String {
    let order = poset.extension();
    let mut cells: Vec<Vec<String>> = vec![std::iter::once(String::new())
        .chain(order.iter().map(|&c| poset.label(c).to_string()))
        .collect()];
    for &r in order {
        let mut row = vec![poset.label(r).to_string()];
        row.extend(order.iter().map(|&c| to_exact_string(matrix.get(r, c))));
        cells.push(row);
    }
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
    let mut out = String::new();
    for row in cells {
        let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        writeln!(out, "{}", line.join(" ").trim_end()).unwrap();
    }
    out
}

/// Nonzero coordinates as `label -> rational string`, in element order.
pub fn vector_json(poset: &Poset, vector: &RationalVector) -> Value {
    let mut map = Map::new();
    for (p, value) in vector.support() {
        map.insert(poset.label(p).into(), exact(value));
    }
    Value::Object(map)
}

pub fn variable_name(lattice: &Lattice, system: &ConstraintSystem, var: usize) -> String {
    let (p, q) = system.pair(var);
    format!("x_{}_{}", lattice.label(p), lattice.label(q))
}

pub fn polytope_json(lattice: &Lattice, system: &ConstraintSystem) -> Value {
    let names: Vec<String> = (0..system.num_vars())
        .map(|v| variable_name(lattice, system, v))
        .collect();
    let equalities: Vec<Value> = system
        .equalities()
        .iter()
        .map(|eq| {
            let terms: Vec<Value> = eq
                .row
                .terms
                .iter()
                .map(|(v, c)| json!([to_exact_string(c), names[*v]]))
                .collect();
            json!({ "family": eq.family.name(), "terms": terms, "rhs": to_exact_string(&eq.row.rhs) })
        })
        .collect();
    let costs = |c: &[Rational]| Value::Array(c.iter().map(exact).collect());
    json!({
        "n": lattice.len(),
        "variables": names,
        "equalities": equalities,
        "costs": {
            "common_lower": costs(system.lower_costs()),
            "common_upper": costs(system.upper_costs()),
        },
    })
}

#[derive(Debug, Deserialize)]
struct PolytopeDump {
    variables: Vec<String>,
    equalities: Vec<EqualityDump>,
    costs: CostsDump,
}

#[derive(Debug, Deserialize)]
struct EqualityDump {
    family: String,
    terms: Vec<(String, String)>,
    rhs: String,
}

#[derive(Debug, Deserialize)]
struct CostsDump {
    common_lower: Vec<String>,
    common_upper: Vec<String>,
}

fn rational(text: &str) -> Result<Rational, FormatError> {
    parse_exact(text).ok_or_else(|| FormatError::BadRational(text.into()))
}

/// Which trace form a re-parsed polytope dump should minimize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DumpCosts {
    CommonLower,
    CommonUpper,
}

/// Rebuilds an LP from a polytope dump: every equality except the trace row,
/// with one of the two cost vectors.
pub fn problem_from_polytope_dump(text: &str, costs: DumpCosts) -> Result<LpProblem, FormatError> {
    let dump: PolytopeDump = serde_json::from_str(text)?;
    let index: std::collections::HashMap<&str, usize> = dump
        .variables
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();
    let raw = match costs {
        DumpCosts::CommonLower => &dump.costs.common_lower,
        DumpCosts::CommonUpper => &dump.costs.common_upper,
    };
    let costs = raw.iter().map(|c| rational(c)).collect::<Result<Vec<_>, _>>()?;
    let mut rows = Vec::new();
    for eq in dump.equalities.iter().filter(|e| e.family != "trace") {
        let terms = eq
            .terms
            .iter()
            .map(|(c, v)| {
                let var = *index
                    .get(v.as_str())
                    .ok_or_else(|| FormatError::UnknownVariable(v.clone()))?;
                Ok((var, rational(c)?))
            })
            .collect::<Result<Vec<_>, FormatError>>()?;
        rows.push(LinearRow::new(terms, rational(&eq.rhs)?));
    }
    Ok(LpProblem::with_rows(costs, rows))
}

pub fn certificate_json(c: &Certificate) -> Value {
    json!({
        "involution": c.involution,
        "order_reversing": c.order_reversing,
        "disjoint": c.disjoint,
        "conjoint": c.conjoint,
        "disjointness_trace": to_exact_string(&c.disjointness_trace),
        "conjointness_trace": to_exact_string(&c.conjointness_trace),
    })
}

pub fn ortho_json(lattice: &Lattice, ortho: &Orthocomplementation) -> Value {
    json!({
        "map": map_value(lattice, &ortho.sigma),
        "certificate": certificate_json(&ortho.certificate),
    })
}

pub fn violation_json(lattice: &Lattice, violation: &OrthoViolation) -> Value {
    let witness = violation
        .witness()
        .map(|(p, q)| json!([lattice.label(p), lattice.label(q)]))
        .unwrap_or(Value::Null);
    json!({
        "pass": false,
        "condition": violation.condition(),
        "witness": witness,
        "message": violation.describe(lattice),
    })
}

pub fn nonexistence_json(cert: &Option<NonexistenceCertificate>) -> Value {
    match cert {
        None => Value::Null,
        Some(NonexistenceCertificate::RootInfeasible) => json!({ "kind": "root_infeasible" }),
        Some(NonexistenceCertificate::RootAboveFloor { optimum }) => {
            json!({ "kind": "root_optimum_above_n", "optimum": to_exact_string(optimum) })
        }
        Some(NonexistenceCertificate::Exhausted { root_optimum }) => {
            json!({ "kind": "search_exhausted", "root_optimum": to_exact_string(root_optimum) })
        }
    }
}

pub fn stats_json(stats: &SearchStats) -> Value {
    json!({
        "lp_solves": stats.lp_solves,
        "branch_nodes": stats.branch_nodes,
        "pivots": stats.pivots,
        "min_relaxation": stats.min_relaxation.as_ref().map(to_exact_string),
        "elapsed_ms": stats.elapsed.map(|d| d.as_millis() as u64),
    })
}

pub fn report_json(lattice: &Lattice, report: &SearchReport, objective: &str, agreement: Option<bool>) -> Value {
    let mut value = json!({
        "method": report.method.name(),
        "objective": objective,
        "n": lattice.len(),
        "count": report.orthos.len(),
        "orthocomplementations": report.orthos.iter().map(|o| ortho_json(lattice, o)).collect::<Vec<_>>(),
        "nonexistence_certificate": nonexistence_json(&report.nonexistence),
        "stats": stats_json(&report.stats),
    });
    if let Some(agree) = agreement {
        value["agreement"] = Value::Bool(agree);
    }
    value
}

pub fn map_text(lattice: &Lattice, sigma: &[usize]) -> String {
    sigma
        .iter()
        .enumerate()
        .map(|(p, &q)| format!("{}->{}", lattice.label(p), lattice.label(q)))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn report_text(lattice: &Lattice, report: &SearchReport, objective: &str, agreement: Option<bool>) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "method: {}, objective: {}, n = {}",
        report.method.name(),
        objective,
        lattice.len()
    )
    .unwrap();
    if let Some(agree) = agreement {
        writeln!(out, "methods agree: {}", if agree { "yes" } else { "NO" }).unwrap();
    }
    writeln!(out, "orthocomplementations: {}", report.orthos.len()).unwrap();
    for (i, ortho) in report.orthos.iter().enumerate() {
        writeln!(
            out,
            "  #{}: {}  [traces {} / {}]",
            i + 1,
            map_text(lattice, &ortho.sigma),
            ortho.certificate.disjointness_trace,
            ortho.certificate.conjointness_trace
        )
        .unwrap();
    }
    match &report.nonexistence {
        None => {}
        Some(NonexistenceCertificate::RootInfeasible) => {
            writeln!(out, "certificate: root relaxation infeasible").unwrap()
        }
        Some(NonexistenceCertificate::RootAboveFloor { optimum }) => {
            writeln!(out, "certificate: root optimum {optimum} > n").unwrap()
        }
        Some(NonexistenceCertificate::Exhausted { root_optimum }) => writeln!(
            out,
            "certificate: root optimum {root_optimum}, no integer optimum in the exhausted tree"
        )
        .unwrap(),
    }
    let s = &report.stats;
    writeln!(
        out,
        "stats: lp_solves={} branch_nodes={} pivots={} min_relaxation={}{}",
        s.lp_solves,
        s.branch_nodes,
        s.pivots,
        s.min_relaxation
            .as_ref()
            .map(to_exact_string)
            .unwrap_or_else(|| "-".into()),
        s.elapsed
            .map(|d| format!(" elapsed_ms={}", d.as_millis()))
            .unwrap_or_default()
    )
    .unwrap();
    out
}
