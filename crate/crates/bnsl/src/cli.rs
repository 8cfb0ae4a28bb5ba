//! Command-line front end: score-file and graph-file parsing, solver
//! dispatch, independent solution verification, and stable machine-readable
//! reports.
//!
//! Exit codes: 0 = yes, 1 = no, 2 = usage or parse error, 3 = internal
//! verification failure. Reports go to standard output and contain only
//! deterministic fields; volatile diagnostics (elapsed time, telemetry)
//! go to standard error.

use crate::arc_bounded::{solve_ba_color_coding, solve_ba_topological, solve_pi0e};
use crate::dissociation::solve_pi1v;
use crate::generators::{
    from_clique, from_hampath, from_multicolored_clique, from_multicolored_independent_set,
    from_triangle_cover, random_instance, ColoredGraph,
};
use crate::graphs::{self, moralize, ArcSet, ClassSpec, DeletionMode, Graph, PiClass};
use crate::oracle::{oracle_solve, Constraint};
use crate::scores::{Instance, ParentScoreTable, ParentSet, Score};
use crate::solve::{ConstraintWitness, SolveResult};
use clap::{Parser, Subcommand, ValueEnum};
use std::ffi::OsString;
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: decimal score `{token}` requires --scale")]
    DecimalScore { line: usize, token: String },
    #[error("line {line}: score `{token}` overflows 64 bits")]
    ScoreOverflow { line: usize, token: String },
    #[error("line {line}: duplicate parent set for vertex `{name}`")]
    DuplicateParentSet { line: usize, name: String },
    #[error("line {line}: unknown parent name `{name}`")]
    UnknownParent { line: usize, name: String },
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Invalid(String),
}

// ---------------------------------------------------------------------------
// Score files
//
// Line 1: n. Then per vertex a header `name r` followed by r lines
// `score p parent1 ... parentp`. `p = 0` sets the explicit empty-set score.
// Scores are nonnegative integers; with `--scale d`, decimal scores are
// multiplied by 10^d, rounded to nearest, and shifted per vertex so every
// candidate is nonnegative.
// ---------------------------------------------------------------------------

/// A parsed score file: names, table, and the affine transform applied by
/// `--scale` (if any), recorded as `(power, total_shift)`.
#[derive(Debug)]
pub struct ScoresFile {
    pub names: Vec<String>,
    pub table: ParentScoreTable,
    pub transform: Option<(u32, i128)>,
}

impl ScoresFile {
    pub fn into_instance(self, t: Score, k: usize) -> Result<Instance, CliError> {
        Instance::new(self.names, self.table, t, k).map_err(|e| CliError::Invalid(e.to_string()))
    }
}

pub fn parse_score_file(text: &str, scale: Option<u32>) -> Result<ScoresFile, CliError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let mut pos = 0;
    let mut next = |what: &str| -> Result<(usize, &str), CliError> {
        let item = lines.get(pos).copied().ok_or_else(|| CliError::Syntax {
            line: lines.last().map_or(1, |(l, _)| *l),
            msg: format!("unexpected end of file, expected {what}"),
        })?;
        pos += 1;
        Ok(item)
    };

    let (nline, ntok) = next("vertex count")?;
    let n: usize = ntok.parse().map_err(|_| CliError::Syntax {
        line: nline,
        msg: format!("expected vertex count, got `{ntok}`"),
    })?;

    // First pass: structure only; parents stay unresolved names.
    struct RawEntry {
        line: usize,
        score_token: String,
        parents: Vec<String>,
    }
    let mut names: Vec<String> = Vec::with_capacity(n);
    let mut raw: Vec<Vec<RawEntry>> = Vec::with_capacity(n);
    for _ in 0..n {
        let (hline, header) = next("vertex header `name r`")?;
        let toks: Vec<&str> = header.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(CliError::Syntax {
                line: hline,
                msg: format!("expected `name r`, got `{header}`"),
            });
        }
        let name = toks[0].to_string();
        let r: usize = toks[1].parse().map_err(|_| CliError::Syntax {
            line: hline,
            msg: format!("expected entry count, got `{}`", toks[1]),
        })?;
        let mut entries = Vec::with_capacity(r);
        for _ in 0..r {
            let (eline, entry) = next("score entry `score p parents...`")?;
            let toks: Vec<&str> = entry.split_whitespace().collect();
            if toks.len() < 2 {
                return Err(CliError::Syntax {
                    line: eline,
                    msg: format!("expected `score p parents...`, got `{entry}`"),
                });
            }
            let p: usize = toks[1].parse().map_err(|_| CliError::Syntax {
                line: eline,
                msg: format!("expected parent count, got `{}`", toks[1]),
            })?;
            if toks.len() != 2 + p {
                return Err(CliError::Syntax {
                    line: eline,
                    msg: format!("expected {p} parent names, got {}", toks.len() - 2),
                });
            }
            entries.push(RawEntry {
                line: eline,
                score_token: toks[0].to_string(),
                parents: toks[2..].iter().map(|s| s.to_string()).collect(),
            });
        }
        names.push(name);
        raw.push(entries);
    }
    if pos < lines.len() {
        return Err(CliError::Syntax {
            line: lines[pos].0,
            msg: format!("trailing content `{}`", lines[pos].1),
        });
    }

    let id_of = |name: &str, line: usize| -> Result<usize, CliError> {
        names
            .iter()
            .position(|x| x == name)
            .ok_or_else(|| CliError::UnknownParent {
                line,
                name: name.to_string(),
            })
    };

    let mut table = ParentScoreTable::new(n);
    let mut total_shift: i128 = 0;
    for (v, entries) in raw.iter().enumerate() {
        // Resolve ids and scores for this vertex first; --scale needs the
        // vertex's minimum before anything is stored.
        let mut resolved: Vec<(usize, ParentSet, i128)> = Vec::with_capacity(entries.len());
        let mut seen_sets = std::collections::HashSet::new();
        for e in entries {
            let mut parents = Vec::with_capacity(e.parents.len());
            for p in &e.parents {
                let pid = id_of(p, e.line)?;
                if pid == v {
                    return Err(CliError::Syntax {
                        line: e.line,
                        msg: format!("vertex `{}` cannot be its own parent", names[v]),
                    });
                }
                parents.push(pid);
            }
            let set = ParentSet::new(parents).ok_or_else(|| CliError::DuplicateParentSet {
                line: e.line,
                name: names[v].clone(),
            })?;
            if !seen_sets.insert(set.clone()) {
                return Err(CliError::DuplicateParentSet {
                    line: e.line,
                    name: names[v].clone(),
                });
            }
            let score = parse_score(&e.score_token, e.line, scale)?;
            resolved.push((e.line, set, score));
        }
        let shift = match scale {
            None => 0,
            Some(_) => {
                // The empty set is always a candidate; its raw value is 0
                // unless the file stores it explicitly.
                let explicit_empty = resolved
                    .iter()
                    .find(|(_, set, _)| set.is_empty())
                    .map(|&(_, _, s)| s);
                resolved
                    .iter()
                    .map(|&(_, _, s)| s)
                    .chain(std::iter::once(explicit_empty.unwrap_or(0)))
                    .min()
                    .unwrap_or(0)
                    .min(0)
            }
        };
        total_shift += shift;
        for (line, set, score) in resolved {
            let shifted = score - shift;
            debug_assert!(shifted >= 0);
            let value = u64::try_from(shifted).map_err(|_| CliError::ScoreOverflow {
                line,
                token: format!("{shifted}"),
            })?;
            if value == 0 && !set.is_empty() {
                // Zero entries are not stored in non-zero representation.
                continue;
            }
            table
                .insert(v, set, value)
                .map_err(|e| match e {
                    crate::scores::ScoreError::DuplicateParentSet(_) => {
                        CliError::DuplicateParentSet {
                            line,
                            name: names[v].clone(),
                        }
                    }
                    other => CliError::Invalid(other.to_string()),
                })?;
        }
    }
    Ok(ScoresFile {
        names,
        table,
        transform: scale.map(|d| (d, total_shift)),
    })
}

fn parse_score(token: &str, line: usize, scale: Option<u32>) -> Result<i128, CliError> {
    match scale {
        None => {
            if let Ok(v) = token.parse::<u64>() {
                return Ok(v as i128);
            }
            if token.parse::<f64>().is_ok() {
                // Distinguish decimals (and negatives) from oversized ints.
                if token.chars().all(|c| c.is_ascii_digit()) {
                    return Err(CliError::ScoreOverflow {
                        line,
                        token: token.to_string(),
                    });
                }
                return Err(CliError::DecimalScore {
                    line,
                    token: token.to_string(),
                });
            }
            Err(CliError::Syntax {
                line,
                msg: format!("expected score, got `{token}`"),
            })
        }
        Some(d) => {
            let x: f64 = token.parse().map_err(|_| CliError::Syntax {
                line,
                msg: format!("expected score, got `{token}`"),
            })?;
            let scaled = (x * 10f64.powi(d as i32)).round();
            if !scaled.is_finite() || scaled.abs() >= 2f64.powi(90) {
                return Err(CliError::ScoreOverflow {
                    line,
                    token: token.to_string(),
                });
            }
            Ok(scaled as i128)
        }
    }
}

/// Canonical writer; `parse_score_file` of the output reproduces the same
/// tables.
pub fn write_score_file(instance: &Instance) -> String {
    let mut out = String::new();
    out.push_str(&format!("{}\n", instance.n()));
    for v in 0..instance.n() {
        let stored = instance.table().stored(v);
        let empty = instance.table().empty_score(v);
        let r = stored.len() + usize::from(empty > 0);
        out.push_str(&format!("{} {}\n", instance.name(v), r));
        if empty > 0 {
            out.push_str(&format!("{empty} 0\n"));
        }
        for e in stored {
            out.push_str(&format!("{} {}", e.score, e.set.len()));
            for &u in e.set.members() {
                out.push_str(&format!(" {}", instance.name(u)));
            }
            out.push('\n');
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Graph files: `n m`, then m lines `u v`, then optionally
// `colors c1 ... cn` with 1-based class labels.
// ---------------------------------------------------------------------------

pub fn parse_graph_file(text: &str) -> Result<(Graph, Option<ColoredGraph>), CliError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    if lines.is_empty() {
        return Err(CliError::Syntax {
            line: 1,
            msg: "empty graph file".into(),
        });
    }
    let (hline, header) = lines[0];
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 2 {
        return Err(CliError::Syntax {
            line: hline,
            msg: format!("expected `n m`, got `{header}`"),
        });
    }
    let n: usize = toks[0].parse().map_err(|_| CliError::Syntax {
        line: hline,
        msg: "bad vertex count".into(),
    })?;
    let m: usize = toks[1].parse().map_err(|_| CliError::Syntax {
        line: hline,
        msg: "bad edge count".into(),
    })?;
    if lines.len() < 1 + m {
        return Err(CliError::Syntax {
            line: lines.last().unwrap().0,
            msg: format!("expected {m} edge lines"),
        });
    }
    let mut g = Graph::empty(n);
    for &(eline, line) in &lines[1..1 + m] {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(CliError::Syntax {
                line: eline,
                msg: format!("expected `u v`, got `{line}`"),
            });
        }
        let u: usize = toks[0].parse().map_err(|_| CliError::Syntax {
            line: eline,
            msg: "bad endpoint".into(),
        })?;
        let v: usize = toks[1].parse().map_err(|_| CliError::Syntax {
            line: eline,
            msg: "bad endpoint".into(),
        })?;
        if g.has_edge(u, v) {
            return Err(CliError::Syntax {
                line: eline,
                msg: format!("duplicate edge {u} {v}"),
            });
        }
        g.insert(u, v).map_err(|e| CliError::Syntax {
            line: eline,
            msg: e.to_string(),
        })?;
    }
    let mut colored = None;
    if lines.len() > 1 + m {
        let (cline, line) = lines[1 + m];
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.first() != Some(&"colors") || toks.len() != 1 + n {
            return Err(CliError::Syntax {
                line: cline,
                msg: format!("expected `colors c1 ... c{n}`"),
            });
        }
        let mut class_of = Vec::with_capacity(n);
        let mut max_label = 0usize;
        for t in &toks[1..] {
            let c: usize = t.parse().map_err(|_| CliError::Syntax {
                line: cline,
                msg: format!("bad color label `{t}`"),
            })?;
            if c == 0 {
                return Err(CliError::Syntax {
                    line: cline,
                    msg: "color labels are 1-based".into(),
                });
            }
            max_label = max_label.max(c);
            class_of.push(c - 1);
        }
        if lines.len() > 2 + m {
            return Err(CliError::Syntax {
                line: lines[2 + m].0,
                msg: "trailing content".into(),
            });
        }
        colored = Some(
            ColoredGraph::new(g.clone(), &class_of, max_label)
                .map_err(|e| CliError::Invalid(e.to_string()))?,
        );
    }
    Ok((g, colored))
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    #[value(name = "pi1v")]
    Pi1v,
    #[value(name = "ba-dp")]
    BaDp,
    #[value(name = "ba-cc")]
    BaCc,
    #[value(name = "pi0e")]
    Pi0e,
    #[value(name = "oracle")]
    Oracle,
}

impl Variant {
    fn label(self) -> &'static str {
        match self {
            Variant::Pi1v => "pi1v",
            Variant::BaDp => "ba-dp",
            Variant::BaCc => "ba-cc",
            Variant::Pi0e => "pi0e",
            Variant::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleConstraint {
    #[value(name = "none")]
    None,
    #[value(name = "pi1v")]
    Pi1v,
    #[value(name = "pi0e")]
    Pi0e,
    #[value(name = "pi2")]
    Pi2,
    #[value(name = "pi3coc")]
    Pi3Coc,
    #[value(name = "arcs")]
    Arcs,
}

impl OracleConstraint {
    fn to_constraint(self, k: usize) -> Constraint {
        match self {
            OracleConstraint::None => Constraint::None,
            OracleConstraint::Arcs => Constraint::ArcCount(k),
            OracleConstraint::Pi1v => Constraint::MoralClass(ClassSpec {
                class: PiClass::Pi1,
                mode: DeletionMode::Vertex,
                budget: k,
            }),
            OracleConstraint::Pi0e => Constraint::MoralClass(ClassSpec {
                class: PiClass::Pi0,
                mode: DeletionMode::Edge,
                budget: k,
            }),
            OracleConstraint::Pi2 => Constraint::MoralClass(ClassSpec {
                class: PiClass::Pi2,
                mode: DeletionMode::Vertex,
                budget: 0,
            }),
            OracleConstraint::Pi3Coc => Constraint::MoralClass(ClassSpec {
                class: PiClass::Pi3Coc,
                mode: DeletionMode::Vertex,
                budget: 0,
            }),
        }
    }
}

/// Renders the stable report document. Every field is deterministic for
/// fixed inputs, seed, and any thread count.
pub fn render_report(
    instance: &Instance,
    variant: Variant,
    seed: u64,
    result: &SolveResult,
    verified: bool,
) -> String {
    let mut out = String::new();
    out.push_str(&format!("variant {}\n", variant.label()));
    out.push_str(&format!(
        "answer {}\n",
        if result.answer { "yes" } else { "no" }
    ));
    out.push_str(&format!("score {}\n", result.score));
    out.push_str(&format!("threshold {}\n", instance.t()));
    out.push_str(&format!("budget {}\n", instance.k()));
    out.push_str(&format!("seed {seed}\n"));
    out.push_str(&format!("arcs {}\n", result.arcs.len()));
    for (u, v) in result.arcs.arcs() {
        out.push_str(&format!("arc {} {}\n", instance.name(u), instance.name(v)));
    }
    match &result.witness {
        ConstraintWitness::Dissociation(vs) => {
            out.push_str("witness dissociation");
            for &v in vs {
                out.push_str(&format!(" {}", instance.name(v)));
            }
            out.push('\n');
        }
        ConstraintWitness::Coloring(cs) => {
            out.push_str("witness coloring");
            for &c in cs {
                out.push_str(&format!(" {}", c + 1));
            }
            out.push('\n');
        }
        ConstraintWitness::MoralEdgeCount(m) => {
            out.push_str(&format!("witness moral-edges {m}\n"));
        }
        ConstraintWitness::ArcCount(a) => {
            out.push_str(&format!("witness arc-count {a}\n"));
        }
        ConstraintWitness::None => out.push_str("witness none\n"),
    }
    out.push_str(&format!("verified {verified}\n"));
    out
}

/// Independent re-check of a solver result: acyclicity, score recomputation
/// from the tables, and the variant's structural constraint. Never trusts
/// solver state.
pub fn verify_solution(
    instance: &Instance,
    variant: Variant,
    constraint: Option<Constraint>,
    arcs: &ArcSet,
    claimed_score: Score,
) -> bool {
    if !graphs::is_dag(arcs) {
        return false;
    }
    let recomputed: Score = arcs
        .parent_lists()
        .into_iter()
        .enumerate()
        .map(|(v, pa)| instance.table().score_of(v, &ParentSet::new(pa).unwrap()))
        .sum();
    if recomputed != claimed_score {
        return false;
    }
    let k = instance.k();
    match variant {
        Variant::Pi1v => {
            let moral = moralize(arcs).expect("acyclicity checked");
            graphs::dissociation_set_at_most(moral.graph(), k).is_some()
        }
        Variant::BaDp | Variant::BaCc => arcs.len() <= k,
        Variant::Pi0e => {
            let moral = moralize(arcs).expect("acyclicity checked");
            moral.m() <= k
        }
        Variant::Oracle => match constraint.unwrap_or(Constraint::None) {
            Constraint::None => true,
            Constraint::ArcCount(k) => arcs.len() <= k,
            Constraint::MoralClass(spec) => {
                let moral = moralize(arcs).expect("acyclicity checked");
                graphs::check_class(moral.graph(), &spec).is_ok_and(|c| c.holds)
            }
        },
    }
}

// ---------------------------------------------------------------------------
// Command line
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "bnsl",
    about = "Exact Bayesian network structure learning under sparsity constraints"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance from a score file.
    Solve {
        #[arg(long, value_enum)]
        variant: Variant,
        /// Score threshold t.
        #[arg(short)]
        t: Score,
        /// Budget k.
        #[arg(short)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Repetition count for ba-cc (default: ceil(e^{2k})).
        #[arg(long)]
        reps: Option<u64>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Constraint for the oracle variant.
        #[arg(long, value_enum, default_value = "none")]
        constraint: OracleConstraint,
        /// Admit decimal scores by scaling with 10^d and shifting.
        #[arg(long)]
        scale: Option<u32>,
        scores: std::path::PathBuf,
    },
    /// Re-check a solution report against its score file.
    Verify {
        #[arg(long, value_enum)]
        variant: Option<Variant>,
        #[arg(long, value_enum, default_value = "none")]
        constraint: OracleConstraint,
        #[arg(long)]
        scale: Option<u32>,
        scores: std::path::PathBuf,
        solution: std::path::PathBuf,
    },
    /// Generate an instance from a graph (or at random); the score file
    /// goes to stdout, the suggested t and k to stderr.
    Gen {
        #[arg(long, value_enum)]
        reduction: Option<Reduction>,
        /// Clique size for the clique reduction.
        #[arg(long)]
        ell: Option<usize>,
        /// Generate a random instance instead of a reduction.
        #[arg(long, conflicts_with = "reduction")]
        random: bool,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        max_parents: Option<usize>,
        #[arg(long)]
        entries: Option<usize>,
        #[arg(long)]
        score_max: Option<Score>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        graph: Option<std::path::PathBuf>,
    },
    /// Basic facts about a score file.
    Stats {
        #[arg(long)]
        scale: Option<u32>,
        scores: std::path::PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Reduction {
    Clique,
    Hampath,
    Tricover,
    Mcc,
    Mis,
}

/// Runs the CLI with explicit argv and output sinks; returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return 2;
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match cli.command {
        Command::Solve {
            variant,
            t,
            k,
            seed,
            reps,
            threads,
            constraint,
            scale,
            scores,
        } => {
            let text = std::fs::read_to_string(&scores)?;
            let parsed = parse_score_file(&text, scale)?;
            if let Some((d, shift)) = parsed.transform {
                writeln!(err, "scale 10^{d} applied; total shift {shift}")?;
            }
            let instance = parsed.into_instance(t, k)?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.max(1))
                .build()
                .map_err(|e| CliError::Invalid(e.to_string()))?;
            let started = std::time::Instant::now();
            let result = pool.install(|| -> Result<SolveResult, CliError> {
                match variant {
                    Variant::Pi1v => Ok(solve_pi1v(&instance)),
                    Variant::BaDp => solve_ba_topological(&instance)
                        .map_err(|e| CliError::Invalid(e.to_string())),
                    Variant::BaCc => solve_ba_color_coding(&instance, seed, reps)
                        .map_err(|e| CliError::Invalid(e.to_string())),
                    Variant::Pi0e => Ok(solve_pi0e(&instance)),
                    Variant::Oracle => {
                        oracle_solve(&instance, &constraint.to_constraint(k))
                            .map_err(|e| CliError::Invalid(e.to_string()))
                    }
                }
            })?;
            let elapsed = started.elapsed().as_millis();
            let oracle_constraint = match variant {
                Variant::Oracle => Some(constraint.to_constraint(k)),
                _ => None,
            };
            let verified =
                verify_solution(&instance, variant, oracle_constraint, &result.arcs, result.score);
            write!(
                out,
                "{}",
                render_report(&instance, variant, seed, &result, verified)
            )?;
            writeln!(err, "elapsed_ms {elapsed}")?;
            writeln!(
                err,
                "telemetry enumerated={} completions={} repetitions={}",
                result.telemetry.enumerated,
                result.telemetry.completions,
                result.telemetry.repetitions
            )?;
            if !verified {
                writeln!(err, "error: verification failed")?;
                return Ok(3);
            }
            Ok(if result.answer { 0 } else { 1 })
        }
        Command::Verify {
            variant,
            constraint,
            scale,
            scores,
            solution,
        } => {
            let text = std::fs::read_to_string(&scores)?;
            let parsed = parse_score_file(&text, scale)?;
            let sol_text = std::fs::read_to_string(&solution)?;
            let sol = parse_report(&sol_text)?;
            let variant = variant.unwrap_or(sol.variant);
            let instance = parsed.into_instance(sol.threshold, sol.budget)?;
            let name_id = |name: &str| -> Result<usize, CliError> {
                instance
                    .names()
                    .iter()
                    .position(|x| x == name)
                    .ok_or_else(|| CliError::Invalid(format!("unknown vertex `{name}`")))
            };
            let mut arcs = ArcSet::empty(instance.n());
            for (u, v) in &sol.arcs {
                arcs.insert(name_id(u)?, name_id(v)?)
                    .map_err(|e| CliError::Invalid(e.to_string()))?;
            }
            let ok = verify_solution(
                &instance,
                variant,
                Some(constraint.to_constraint(sol.budget)),
                &arcs,
                sol.score,
            ) && sol.answer == (sol.score >= sol.threshold);
            let answer = sol.score >= instance.t();
            writeln!(out, "variant {}", variant.label())?;
            writeln!(out, "answer {}", if answer { "yes" } else { "no" })?;
            writeln!(out, "score {}", sol.score)?;
            writeln!(out, "threshold {}", instance.t())?;
            writeln!(out, "budget {}", instance.k())?;
            writeln!(out, "verified {ok}")?;
            if !ok {
                return Ok(3);
            }
            Ok(if answer { 0 } else { 1 })
        }
        Command::Gen {
            reduction,
            ell,
            random,
            n,
            max_parents,
            entries,
            score_max,
            seed,
            graph,
        } => {
            let instance = if random {
                let n = n.ok_or_else(|| CliError::Invalid("--random requires --n".into()))?;
                let max_parents = max_parents
                    .ok_or_else(|| CliError::Invalid("--random requires --max-parents".into()))?;
                let entries = entries
                    .ok_or_else(|| CliError::Invalid("--random requires --entries".into()))?;
                let hi = score_max.unwrap_or(100);
                random_instance(n, max_parents, entries, 1..=hi, seed)
                    .map_err(|e| CliError::Invalid(e.to_string()))?
            } else {
                let reduction = reduction.ok_or_else(|| {
                    CliError::Invalid("choose --reduction or --random".into())
                })?;
                let path = graph
                    .ok_or_else(|| CliError::Invalid("reduction requires a graph file".into()))?;
                let text = std::fs::read_to_string(&path)?;
                let (g, colored) = parse_graph_file(&text)?;
                let need_colors = || {
                    colored
                        .clone()
                        .ok_or_else(|| CliError::Invalid("graph file needs a colors line".into()))
                };
                match reduction {
                    Reduction::Clique => {
                        let ell = ell
                            .ok_or_else(|| CliError::Invalid("clique requires --ell".into()))?;
                        from_clique(&g, ell)
                    }
                    Reduction::Hampath => from_hampath(&g),
                    Reduction::Tricover => from_triangle_cover(&g),
                    Reduction::Mcc => from_multicolored_clique(&need_colors()?),
                    Reduction::Mis => from_multicolored_independent_set(&need_colors()?),
                }
                .map_err(|e| CliError::Invalid(e.to_string()))?
            };
            write!(out, "{}", write_score_file(&instance))?;
            writeln!(err, "t {}", instance.t())?;
            writeln!(err, "k {}", instance.k())?;
            Ok(0)
        }
        Command::Stats { scale, scores } => {
            let text = std::fs::read_to_string(&scores)?;
            let parsed = parse_score_file(&text, scale)?;
            let instance = parsed.into_instance(0, 0)?;
            let superstructure = instance.superstructure();
            writeln!(out, "n {}", instance.n())?;
            writeln!(out, "delta {}", instance.delta())?;
            writeln!(out, "superstructure-arcs {}", superstructure.arcs.len())?;
            writeln!(
                out,
                "acyclic {}",
                graphs::is_dag(&superstructure.arcs)
            )?;
            Ok(0)
        }
    }
}

/// The fields `verify` needs back out of a report document.
pub struct ParsedReport {
    pub variant: Variant,
    pub answer: bool,
    pub score: Score,
    pub threshold: Score,
    pub budget: usize,
    pub arcs: Vec<(String, String)>,
}

pub fn parse_report(text: &str) -> Result<ParsedReport, CliError> {
    let mut variant = None;
    let mut answer = None;
    let mut score = None;
    let mut threshold = None;
    let mut budget = None;
    let mut arcs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let bad = |msg: &str| CliError::Syntax {
            line: i + 1,
            msg: msg.to_string(),
        };
        match toks[0] {
            "variant" if toks.len() == 2 => {
                variant = Some(match toks[1] {
                    "pi1v" => Variant::Pi1v,
                    "ba-dp" => Variant::BaDp,
                    "ba-cc" => Variant::BaCc,
                    "pi0e" => Variant::Pi0e,
                    "oracle" => Variant::Oracle,
                    other => return Err(bad(&format!("unknown variant `{other}`"))),
                });
            }
            "answer" if toks.len() == 2 => answer = Some(toks[1] == "yes"),
            "score" if toks.len() == 2 => {
                score = Some(toks[1].parse().map_err(|_| bad("bad score"))?)
            }
            "threshold" if toks.len() == 2 => {
                threshold = Some(toks[1].parse().map_err(|_| bad("bad threshold"))?)
            }
            "budget" if toks.len() == 2 => {
                budget = Some(toks[1].parse().map_err(|_| bad("bad budget"))?)
            }
            "arc" if toks.len() == 3 => {
                arcs.push((toks[1].to_string(), toks[2].to_string()))
            }
            "seed" | "arcs" | "witness" | "verified" => {}
            other => return Err(bad(&format!("unknown report field `{other}`"))),
        }
    }
    Ok(ParsedReport {
        variant: variant.ok_or(CliError::Invalid("report misses variant".into()))?,
        answer: answer.ok_or(CliError::Invalid("report misses answer".into()))?,
        score: score.ok_or(CliError::Invalid("report misses score".into()))?,
        threshold: threshold.ok_or(CliError::Invalid("report misses threshold".into()))?,
        budget: budget.ok_or(CliError::Invalid("report misses budget".into()))?,
        arcs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(args.iter().copied(), &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn parses_minimal_score_files() {
        let f = parse_score_file("1\nA 1\n5 0\n", None).unwrap();
        assert_eq!(f.names, vec!["A"]);
        assert_eq!(f.table.empty_score(0), 5);

        let f = parse_score_file("2\nA 0\nB 1\n7 1 A\n", None).unwrap();
        assert_eq!(f.table.stored(1).len(), 1);
        assert_eq!(f.table.stored(1)[0].score, 7);
        assert_eq!(f.table.stored(1)[0].set.members(), &[0]);
    }

    #[test]
    fn rejects_decimal_scores_without_scale() {
        let e = parse_score_file("1\nA 1\n3.5 0\n", None).unwrap_err();
        assert!(matches!(e, CliError::DecimalScore { line: 3, .. }));
    }

    #[test]
    fn scale_shifts_to_nonnegative() {
        // Entries -2.5 and -4.0 for one vertex: scaled by 10, the minimum
        // candidate is -40, so stored scores become 15 and 0 (dropped) with
        // the empty set at 40.
        let f = parse_score_file("2\nA 2\n-2.5 1 B\n-4.0 1 B\nB 0\n", Some(1));
        assert!(f.is_err()); // duplicate parent set {B}
        let f = parse_score_file("2\nA 2\n-2.5 1 B\n-4.0 0\nB 0\n", Some(1)).unwrap();
        assert_eq!(f.table.empty_score(0), 0);
        assert_eq!(f.table.stored(0)[0].score, 15);
        assert_eq!(f.transform, Some((1, -40)));
    }

    #[test]
    fn rejects_duplicates_and_unknowns() {
        let e = parse_score_file("2\nA 2\n1 1 B\n2 1 B\nB 0\n", None).unwrap_err();
        assert!(matches!(e, CliError::DuplicateParentSet { .. }));
        let e = parse_score_file("1\nA 1\n1 1 Z\n", None).unwrap_err();
        assert!(matches!(e, CliError::UnknownParent { .. }));
        let e = parse_score_file(&format!("1\nA 1\n{} 0\n", u128::MAX), None).unwrap_err();
        assert!(matches!(e, CliError::ScoreOverflow { .. }));
        // Duplicate vertex names surface when the instance is assembled.
        let parsed = parse_score_file("2\nA 0\nA 0\n", None).unwrap();
        assert!(parsed.into_instance(0, 0).is_err());
    }

    #[test]
    fn score_file_round_trip() {
        let inst = crate::generators::random_instance(5, 3, 4, 1..=50, 7).unwrap();
        let text = write_score_file(&inst);
        let parsed = parse_score_file(&text, None).unwrap();
        let rebuilt = Instance::new(parsed.names, parsed.table, 0, 0).unwrap();
        assert_eq!(rebuilt, inst);
    }

    #[test]
    fn graph_file_with_colors() {
        let (g, colored) = parse_graph_file("3 2\n0 1\n1 2\ncolors 1 2 3\n").unwrap();
        assert_eq!(g.m(), 2);
        let cg = colored.unwrap();
        assert_eq!(cg.classes().len(), 3);
        assert!(parse_graph_file("2 1\n0 0\n").is_err());
        assert!(parse_graph_file("2 2\n0 1\n1 0\n").is_err());
    }

    #[test]
    fn solve_reports_and_exit_codes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("triangle.scores");
        std::fs::write(&path, "3\na 0\nb 0\nc 1\n10 2 a b\n").unwrap();
        let p = path.to_str().unwrap();

        let (code, out, _) = run_str(&[
            "bnsl", "solve", "--variant", "pi1v", "-t", "10", "-k", "1", p,
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("answer yes"));
        assert!(out.contains("score 10"));
        assert!(out.contains("arc a c"));
        assert!(out.contains("arc b c"));
        assert!(out.contains("verified true"));

        let (code, out, _) = run_str(&[
            "bnsl", "solve", "--variant", "pi1v", "-t", "11", "-k", "1", p,
        ]);
        assert_eq!(code, 1);
        assert!(out.contains("answer no"));

        let (code, _, _) = run_str(&["bnsl", "solve", "--variant", "nope", "-t", "0", "-k", "0", p]);
        assert_eq!(code, 2);
    }

    #[test]
    fn seeded_solves_are_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pair.scores");
        std::fs::write(&path, "2\na 0\nb 1\n7 1 a\n").unwrap();
        let p = path.to_str().unwrap();
        let args = [
            "bnsl", "solve", "--variant", "ba-cc", "-t", "7", "-k", "1", "--seed", "1", p,
        ];
        let (c1, o1, _) = run_str(&args);
        let (c2, o2, _) = run_str(&args);
        assert_eq!(c1, 0);
        assert_eq!(c1, c2);
        assert_eq!(o1, o2);
    }

    #[test]
    fn verify_detects_tampering() {
        let dir = tempfile::tempdir().unwrap();
        let scores = dir.path().join("triangle.scores");
        std::fs::write(&scores, "3\na 0\nb 0\nc 1\n10 2 a b\n").unwrap();
        let sp = scores.to_str().unwrap();
        let (code, report, _) = run_str(&[
            "bnsl", "solve", "--variant", "pi1v", "-t", "10", "-k", "1", sp,
        ]);
        assert_eq!(code, 0);

        let sol = dir.path().join("good.report");
        std::fs::write(&sol, &report).unwrap();
        let (code, out, _) = run_str(&["bnsl", "verify", sp, sol.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert!(out.contains("verified true"));

        let tampered = report.replace("arc a c\n", "");
        let bad = dir.path().join("bad.report");
        std::fs::write(&bad, &tampered).unwrap();
        let (code, out, _) = run_str(&["bnsl", "verify", sp, bad.to_str().unwrap()]);
        assert_eq!(code, 3);
        assert!(out.contains("verified false"));
    }

    #[test]
    fn verify_accepts_every_variant_report() {
        let dir = tempfile::tempdir().unwrap();
        let inst = crate::generators::random_instance(5, 2, 3, 1..=20, 11).unwrap();
        let scores = dir.path().join("inst.scores");
        std::fs::write(&scores, write_score_file(&inst)).unwrap();
        let sp = scores.to_str().unwrap();
        let cases: Vec<Vec<&str>> = vec![
            vec!["bnsl", "solve", "--variant", "pi1v", "-t", "1", "-k", "1", sp],
            vec!["bnsl", "solve", "--variant", "ba-cc", "-t", "1", "-k", "2", "--seed", "4", sp],
            vec!["bnsl", "solve", "--variant", "pi0e", "-t", "1", "-k", "2", sp],
            vec![
                "bnsl", "solve", "--variant", "oracle", "--constraint", "arcs", "-t", "1",
                "-k", "2", sp,
            ],
        ];
        for (i, args) in cases.iter().enumerate() {
            let (code, report, _) = run_str(args);
            assert!(code <= 1, "case {i} failed to solve");
            let sol = dir.path().join(format!("case{i}.report"));
            std::fs::write(&sol, &report).unwrap();
            let mut vargs = vec!["bnsl", "verify"];
            if args.contains(&"oracle") {
                vargs.extend(["--constraint", "arcs"]);
            }
            vargs.extend([sp, sol.to_str().unwrap()]);
            let (vcode, vout, _) = run_str(&vargs);
            assert!(vout.contains("verified true"), "case {i}: {vout}");
            assert_eq!(vcode, code, "case {i} verify/solve answers disagree");
        }
    }

    #[test]
    fn gen_and_stats_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let graph = dir.path().join("k3.graph");
        std::fs::write(&graph, "3 3\n0 1\n0 2\n1 2\ncolors 1 2 3\n").unwrap();
        let (code, out, err) = run_str(&[
            "bnsl",
            "gen",
            "--reduction",
            "mcc",
            graph.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        assert!(err.contains("t 3"));
        assert!(err.contains("k 15"));

        let scores = dir.path().join("mcc.scores");
        std::fs::write(&scores, &out).unwrap();
        let (code, out, _) = run_str(&["bnsl", "stats", scores.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert!(out.contains("n 7"));
        assert!(out.contains("acyclic true"));
    }
}
