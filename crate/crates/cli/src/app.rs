//! Command-line parsing and the commands themselves.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use orthoforge_core::lp::LpOptions;
use orthoforge_core::search::compare_reports;
use orthoforge_core::{
    brute_force_orthos, build_polytope, generate, linearized_join, linearized_meet, moebius_matrix, verify_ortho,
    zeta_matrix, Family, Lattice, LatticeError, Method, Objective, Poset, PosetSpec, RationalVector, SearchError,
    SearchReport,
};
use serde_json::{json, Value};

use crate::format::{self, FormatError};
use crate::parallel::lp_orthos_parallel;

/// Above this size the LP route may run into the pivot cap.
const LARGE_LATTICE: usize = 20;

pub mod exit {
    pub const OK: i32 = 0;
    pub const MALFORMED: i32 = 1;
    pub const NOT_A_LATTICE: i32 = 2;
    pub const RESOURCE_CAP: i32 = 3;
    pub const DISAGREEMENT: i32 = 4;
    pub const VERIFICATION: i32 = 5;
}

#[derive(Debug, Parser)]
#[command(
    name = "orthoforge",
    version,
    about = "Find every orthocomplementation of a finite lattice"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub config: Config,
}

#[derive(Debug, Clone, Args)]
pub struct Config {
    #[arg(long, global = true, value_enum, default_value_t = MethodArg::Both)]
    pub method: MethodArg,
    /// Trace minimized by the LP; the other one is checked afterwards.
    #[arg(long, global = true, value_enum, default_value_t = ObjectiveArg::Conjoint)]
    pub objective: ObjectiveArg,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: u32,
    /// Simplex pivots allowed per LP solve.
    #[arg(long, global = true, default_value_t = orthoforge_core::lp::DEFAULT_PIVOT_CAP)]
    pub pivot_cap: u64,
    /// Write the report here instead of stdout.
    #[arg(short = 'o', long = "output", global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Lp,
    Brute,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    Conjoint,
    Disjoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Clone, Args)]
pub struct Source {
    /// Lattice file (JSON).
    pub input: Option<PathBuf>,
    /// Built-in lattice instead of a file, e.g. `mo:2`, `boolean:3`, `n5`.
    #[arg(long = "gen", value_name = "FAMILY[:K]", conflicts_with = "input")]
    pub generator: Option<String>,
}

/// A source plus trailing positional arguments; with `--gen` the first
/// positional is not a path.
#[derive(Debug, Clone, Args)]
pub struct SourceWith {
    #[arg(required = true)]
    pub args: Vec<String>,
    #[arg(long = "gen", value_name = "FAMILY[:K]")]
    pub generator: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a poset and decide whether it is a lattice.
    Check(Source),
    /// Dump the zeta matrix in the linear extension.
    Zeta(Source),
    /// Dump the Möbius matrix in the linear extension.
    Moebius(Source),
    /// Enumerate orthocomplementations.
    Find(Source),
    /// Check a candidate map: `verify [INPUT] MAP`.
    Verify(SourceWith),
    /// Dump the polytope of precomplements.
    Polytope(Source),
    /// Linearized meet of two elements: `linmeet [INPUT] P Q`.
    Linmeet(SourceWith),
    /// Linearized join of two elements: `linjoin [INPUT] P Q`.
    Linjoin(SourceWith),
    /// Print a lattice file for a built-in family.
    Generate { family: String, size: Option<usize> },
}

/// Anything that ends a command early, with its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Malformed(String),
    #[error("{0}")]
    NotALattice(String),
    #[error("{0}")]
    ResourceCap(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Malformed(_) => exit::MALFORMED,
            CliError::NotALattice(_) => exit::NOT_A_LATTICE,
            CliError::ResourceCap(_) => exit::RESOURCE_CAP,
            CliError::Internal(_) => exit::VERIFICATION,
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Malformed(e.to_string())
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        if e.is_resource_limit() {
            CliError::ResourceCap(e.to_string())
        } else {
            CliError::Internal(e.to_string())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedOrder {
    Input,
    Lex,
}

impl SeedOrder {
    pub fn from_env(value: Option<&str>) -> Result<Self, CliError> {
        match value {
            None | Some("input") => Ok(SeedOrder::Input),
            Some("lex") => Ok(SeedOrder::Lex),
            Some(other) => Err(CliError::Malformed(format!(
                "ORTHOFORGE_SEED_ORDER must be `input` or `lex`, not `{other}`"
            ))),
        }
    }
}

/// What a command produced: the report and the exit code it implies.
struct Output {
    body: String,
    code: i32,
}

impl Output {
    fn ok(body: String) -> Self {
        Output { body, code: exit::OK }
    }
}

struct Context<'a> {
    config: Config,
    seed: SeedOrder,
    warnings: &'a mut Vec<String>,
}

/// Runs the tool on `args` (program name first). Returns the exit code.
pub fn run<I, T>(args: I, seed_order: Option<&str>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::MALFORMED } else { exit::OK };
            let text = e.render().to_string();
            let _ = if code == exit::OK {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut warnings = Vec::new();
    let result = SeedOrder::from_env(seed_order).and_then(|seed| {
        let mut ctx = Context {
            config: cli.config.clone(),
            seed,
            warnings: &mut warnings,
        };
        dispatch(&cli.command, &mut ctx)
    });
    for w in &warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    match result {
        Ok(output) => {
            let written = match &cli.config.output {
                Some(path) => std::fs::write(path, &output.body),
                None => stdout.write_all(output.body.as_bytes()),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: cannot write output: {e}");
                return exit::MALFORMED;
            }
            output.code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.code()
        }
    }
}

fn dispatch(command: &Command, ctx: &mut Context<'_>) -> Result<Output, CliError> {
    match command {
        Command::Check(source) => check(ctx, source),
        Command::Zeta(source) => matrix(ctx, source, false),
        Command::Moebius(source) => matrix(ctx, source, true),
        Command::Find(source) => find(ctx, source),
        Command::Verify(with) => verify(ctx, with),
        Command::Polytope(source) => polytope(ctx, source),
        Command::Linmeet(with) => linearized(ctx, with, false),
        Command::Linjoin(with) => linearized(ctx, with, true),
        Command::Generate { family, size } => generate_file(family, *size),
    }
}

fn parse_family(text: &str) -> Result<PosetSpec, CliError> {
    let (name, size) = match text.split_once(':') {
        Some((name, k)) => {
            let k = k
                .parse::<usize>()
                .map_err(|_| CliError::Malformed(format!("bad size in `{text}`")))?;
            (name, Some(k))
        }
        None => (text, None),
    };
    let family: Family = name
        .parse()
        .map_err(|e: orthoforge_core::GenerateError| CliError::Malformed(e.to_string()))?;
    generate(family, size).map_err(|e| CliError::Malformed(e.to_string()))
}

fn read_file(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Malformed(format!("cannot read {}: {e}", path.display())))
}

impl Context<'_> {
    fn load(&mut self, input: Option<&PathBuf>, generator: Option<&str>) -> Result<PosetSpec, CliError> {
        let spec = match (input, generator) {
            (Some(path), None) => format::parse_poset(&read_file(path)?)?,
            (None, Some(spec)) => parse_family(spec)?,
            _ => return Err(CliError::Malformed("give exactly one of INPUT or --gen".into())),
        };
        for &(a, b) in spec.redundant_covers() {
            self.warnings.push(format!(
                "cover {} < {} is implied by others and was dropped",
                spec.elements()[a],
                spec.elements()[b]
            ));
        }
        Ok(match self.seed {
            SeedOrder::Input => spec,
            SeedOrder::Lex => spec.lex_ordered(),
        })
    }

    fn poset(&mut self, source: &Source) -> Result<Poset, CliError> {
        let spec = self.load(source.input.as_ref(), source.generator.as_deref())?;
        Ok(Poset::new(&spec))
    }

    fn lattice(&mut self, source: &Source) -> Result<Lattice, CliError> {
        let poset = self.poset(source)?;
        lattice_of(poset)
    }

    /// Splits `args` into an optional input path and exactly `k` trailing values.
    fn split<'w>(&mut self, with: &'w SourceWith, k: usize, usage: &str) -> Result<(Source, &'w [String]), CliError> {
        let expected = if with.generator.is_some() { k } else { k + 1 };
        if with.args.len() != expected {
            return Err(CliError::Malformed(format!("usage: {usage}")));
        }
        let (input, rest) = if with.generator.is_some() {
            (None, &with.args[..])
        } else {
            (Some(PathBuf::from(&with.args[0])), &with.args[1..])
        };
        Ok((
            Source {
                input,
                generator: with.generator.clone(),
            },
            rest,
        ))
    }

    fn json(&self) -> bool {
        self.config.format == OutputFormat::Json
    }
}

fn lattice_of(poset: Poset) -> Result<Lattice, CliError> {
    Lattice::new(poset).map_err(|e| {
        if e.is_not_a_lattice() {
            CliError::NotALattice(e.to_string())
        } else {
            CliError::Malformed(e.to_string())
        }
    })
}

fn pretty(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("values always serialize");
    text.push('\n');
    text
}

fn check(ctx: &mut Context<'_>, source: &Source) -> Result<Output, CliError> {
    let poset = ctx.poset(source)?;
    let n = poset.len();
    match Lattice::new(poset) {
        Ok(lattice) => {
            let (bottom, top) = (lattice.label(lattice.bottom()), lattice.label(lattice.top()));
            let body = if ctx.json() {
                pretty(&json!({ "lattice": true, "n": n, "bottom": bottom, "top": top }))
            } else {
                format!("lattice, n={n}, bottom={bottom}, top={top}\n")
            };
            Ok(Output::ok(body))
        }
        Err(e) if e.is_not_a_lattice() => {
            let witness = match &e {
                LatticeError::NotALattice { p, q, .. } => json!([p, q]),
                _ => Value::Null,
            };
            let body = if ctx.json() {
                pretty(&json!({ "lattice": false, "n": n, "reason": e.to_string(), "witness": witness }))
            } else {
                format!("{e}\n")
            };
            Ok(Output {
                body,
                code: exit::NOT_A_LATTICE,
            })
        }
        Err(e) => Err(CliError::Malformed(e.to_string())),
    }
}

fn matrix(ctx: &mut Context<'_>, source: &Source, moebius: bool) -> Result<Output, CliError> {
    let poset = ctx.poset(source)?;
    let m = if moebius {
        moebius_matrix(&poset).map_err(|e| CliError::Internal(e.to_string()))?
    } else {
        zeta_matrix(&poset)
    };
    Ok(Output::ok(if ctx.json() {
        format!("{}\n", format::matrix_json(&poset, &m))
    } else {
        format::matrix_text(&poset, &m)
    }))
}

fn objective(ctx: &Context<'_>) -> Objective {
    match ctx.config.objective {
        ObjectiveArg::Conjoint => Objective::Conjoint,
        ObjectiveArg::Disjoint => Objective::Disjoint,
    }
}

fn find(ctx: &mut Context<'_>, source: &Source) -> Result<Output, CliError> {
    let lattice = ctx.lattice(source)?;
    let objective = objective(ctx);
    let options = LpOptions {
        pivot_cap: ctx.config.pivot_cap,
        ..LpOptions::default()
    };
    let workers = ctx.config.workers as usize;
    if ctx.config.method != MethodArg::Brute && lattice.len() > LARGE_LATTICE {
        ctx.warnings.push(format!(
            "{} elements: the LP has {} variables and may hit the pivot cap",
            lattice.len(),
            lattice.len() * lattice.len()
        ));
    }
    let start = Instant::now();
    let lp = || lp_orthos_parallel(&lattice, objective, &options, workers);
    let (mut report, agreement): (SearchReport, Option<bool>) = match ctx.config.method {
        MethodArg::Lp => (lp()?, None),
        MethodArg::Brute => (brute_force_orthos(&lattice), None),
        MethodArg::Both => {
            let mut lp = lp()?;
            let brute = brute_force_orthos(&lattice);
            let agree = compare_reports(&lp, &brute).is_ok();
            if !agree {
                ctx.warnings.push(format!(
                    "methods disagree: lp found {}, brute force found {}",
                    lp.orthos.len(),
                    brute.orthos.len()
                ));
            }
            lp.method = Method::Both;
            (lp, Some(agree))
        }
    };
    report.stats.elapsed = Some(start.elapsed());
    let body = if ctx.json() {
        pretty(&format::report_json(&lattice, &report, objective.name(), agreement))
    } else {
        format::report_text(&lattice, &report, objective.name(), agreement)
    };
    Ok(Output {
        body,
        code: if agreement == Some(false) {
            exit::DISAGREEMENT
        } else {
            exit::OK
        },
    })
}

fn verify(ctx: &mut Context<'_>, with: &SourceWith) -> Result<Output, CliError> {
    let (source, rest) = ctx.split(with, 1, "verify [INPUT] MAP")?;
    let lattice = ctx.lattice(&source)?;
    let sigma = format::parse_map(&read_file(&PathBuf::from(&rest[0]))?, &lattice)?;
    Ok(match verify_ortho(&lattice, &sigma) {
        Ok(ortho) => Output::ok(if ctx.json() {
            pretty(&json!({ "pass": true, "certificate": format::certificate_json(&ortho.certificate) }))
        } else {
            format!(
                "pass: {}  [traces {} / {}]\n",
                format::map_text(&lattice, &sigma),
                ortho.certificate.disjointness_trace,
                ortho.certificate.conjointness_trace
            )
        }),
        Err(violation) => Output {
            body: if ctx.json() {
                pretty(&format::violation_json(&lattice, &violation))
            } else {
                let mut text = format!("fail ({}): {}", violation.condition(), violation.describe(&lattice));
                if let Some((p, q)) = violation.witness() {
                    write!(text, "; witness ({}, {})", lattice.label(p), lattice.label(q)).unwrap();
                }
                text + "\n"
            },
            code: exit::VERIFICATION,
        },
    })
}

fn polytope(ctx: &mut Context<'_>, source: &Source) -> Result<Output, CliError> {
    let lattice = ctx.lattice(source)?;
    let system = build_polytope(&lattice);
    Ok(Output::ok(if ctx.json() {
        format!("{}\n", format::polytope_json(&lattice, &system))
    } else {
        let mut text = format!("n = {}, {} variables\n", lattice.len(), system.num_vars());
        for eq in system.equalities() {
            let terms: Vec<String> = eq
                .row
                .terms
                .iter()
                .map(|(v, c)| format!("{c}*{}", format::variable_name(&lattice, &system, *v)))
                .collect();
            writeln!(text, "[{}] {} = {}", eq.family, terms.join(" + "), eq.row.rhs).unwrap();
        }
        text
    }))
}

fn linearized(ctx: &mut Context<'_>, with: &SourceWith, join: bool) -> Result<Output, CliError> {
    let usage = if join {
        "linjoin [INPUT] P Q"
    } else {
        "linmeet [INPUT] P Q"
    };
    let (source, rest) = ctx.split(with, 2, usage)?;
    let poset = ctx.poset(&source)?;
    let delta = |label: &String| {
        poset
            .index_of(label)
            .map(|p| RationalVector::delta(poset.len(), p))
            .ok_or_else(|| CliError::Malformed(format!("unknown label `{label}`")))
    };
    let (f, g) = (delta(&rest[0])?, delta(&rest[1])?);
    let result = if join {
        linearized_join(&poset, &f, &g)
    } else {
        linearized_meet(&poset, &f, &g)
    }
    .map_err(|e| CliError::Internal(e.to_string()))?;
    let value = format::vector_json(&poset, &result);
    Ok(Output::ok(if ctx.json() {
        format!("{value}\n")
    } else {
        let terms: Vec<String> = result
            .support()
            .map(|(p, c)| format!("{c}*{}", poset.label(p)))
            .collect();
        if terms.is_empty() {
            "0\n".into()
        } else {
            format!("{}\n", terms.join(" + "))
        }
    }))
}

fn generate_file(family: &str, size: Option<usize>) -> Result<Output, CliError> {
    let spec = match size {
        Some(k) => parse_family(&format!("{family}:{k}"))?,
        None => parse_family(family)?,
    };
    Ok(Output::ok(format::dump_poset(&spec)))
}
