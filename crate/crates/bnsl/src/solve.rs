//! Shared solver output: optimal score, witness arc set, the
//! variant-specific constraint witness, and telemetry counters.

use crate::graphs::ArcSet;
use crate::scores::Score;

/// Evidence that the returned arc set satisfies the variant's constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstraintWitness {
    /// Vertex set whose removal leaves the moralized graph with max degree 1.
    Dissociation(Vec<usize>),
    /// The successful coloring of a color-coding run (0-based colors).
    Coloring(Vec<usize>),
    /// Edge count of the moralized graph of the witness.
    MoralEdgeCount(usize),
    /// Number of arcs used by the witness.
    ArcCount(usize),
    None,
}

/// Counters describing the work a solver performed. Not part of the stable
/// report (counts can vary with pruning and scheduling).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Telemetry {
    /// Search units examined: ancestor-tuple candidates, arc subsets,
    /// parent-set assignments, or DP cells, depending on the solver.
    pub enumerated: u64,
    /// Completion/matching subproblems solved.
    pub completions: u64,
    /// Independent randomized repetitions performed.
    pub repetitions: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    /// Whether the optimal (or best found, for randomized solvers) score
    /// reaches the instance threshold `t`.
    pub answer: bool,
    /// The score of `arcs`.
    pub score: Score,
    /// The witness arc set.
    pub arcs: ArcSet,
    pub witness: ConstraintWitness,
    pub telemetry: Telemetry,
}

impl SolveResult {
    pub(crate) fn new(
        t: Score,
        score: Score,
        arcs: ArcSet,
        witness: ConstraintWitness,
    ) -> SolveResult {
        SolveResult {
            answer: score >= t,
            score,
            arcs,
            witness,
            telemetry: Telemetry::default(),
        }
    }
}
