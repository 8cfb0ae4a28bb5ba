//! Solver for networks whose moralized graph is within `k` vertex deletions
//! of maximum degree one: enumerate the deleted set `S` together with the
//! ancestor tuple `<Q, A_Q>` covering everything that feeds into `S`, then
//! complete the remaining vertices optimally through a maximum weight
//! matching reduction.

use crate::graphs::{self, dissociation_set_at_most, moralize, ArcSet};
use crate::matching::{max_weight_matching, WeightedGraph};
use crate::scores::{Instance, ParentSet, Score, ScoreError, VertexId};
use crate::solve::{ConstraintWitness, SolveResult, Telemetry};
use itertools::Itertools;
use rayon::prelude::*;
use std::sync::atomic::{AtomicU64, Ordering};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TupleError {
    #[error("S and Q must be sorted, duplicate-free, and disjoint")]
    BadSets,
    #[error("arc ({0}, {1}) leaves S ∪ Q")]
    ArcOutsideTuple(usize, usize),
    #[error("condition (a) violated: (S ∪ Q, A_Q) contains a directed cycle")]
    NotADag,
    #[error("condition (b) violated: vertex {0} of Q has no descendant in S")]
    NoDescendantInS(usize),
    #[error("condition (c) violated: vertex {0} of Q has more than one moral neighbor outside S")]
    TooManyOutsideNeighbors(usize),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SuitabilityError {
    #[error("arc ({0}, {1}) does not point into R")]
    HeadOutsideR(usize, usize),
    #[error("arc ({0}, {1}) starts in Q1, which may not touch R")]
    TailInQ1(usize, usize),
    #[error("vertex {0} has more than one incident arc inside (R ∪ Q0) × R")]
    TooManyIncidentArcs(usize),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Pi1vError {
    #[error(transparent)]
    Tuple(#[from] TupleError),
    #[error(transparent)]
    Suitability(#[from] SuitabilityError),
    #[error("precondition violated: S is not a dissociation set of the moralized graph")]
    NotADissociationSet,
    #[error("input is not a DAG")]
    InputNotADag,
    #[error(transparent)]
    Score(#[from] ScoreError),
}

/// `Q` split by degree in `Mo(D_Q) - S`: `Q0` has degree zero and may still
/// gain one arc into `R`; `Q1` has degree one and is saturated. `R` holds
/// everything outside `S ∪ Q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TuplePartition {
    pub q0: Vec<VertexId>,
    pub q1: Vec<VertexId>,
    pub r: Vec<VertexId>,
}

fn sorted_unique(xs: &[VertexId]) -> bool {
    xs.windows(2).all(|w| w[0] < w[1])
}

/// Checks whether `<Q, A_Q>` is an ancestor tuple for `S`: (a) the tuple
/// graph is a DAG, (b) every vertex of `Q` has a descendant in `S`, and
/// (c) in the tuple's moralized graph every vertex of `Q` has at most one
/// neighbor outside `S`. Reports the first violation. `S` and `Q` must be
/// sorted, disjoint id lists; `A_Q` must stay within `(S ∪ Q) × (S ∪ Q)`.
pub fn is_ancestor_tuple(
    s: &[VertexId],
    q: &[VertexId],
    a_q: &ArcSet,
) -> Result<(), TupleError> {
    if !sorted_unique(s) || !sorted_unique(q) {
        return Err(TupleError::BadSets);
    }
    if q.iter().any(|v| s.binary_search(v).is_ok()) {
        return Err(TupleError::BadSets);
    }
    let inside = |v: usize| s.binary_search(&v).is_ok() || q.binary_search(&v).is_ok();
    for (u, v) in a_q.arcs() {
        if !inside(u) || !inside(v) {
            return Err(TupleError::ArcOutsideTuple(u, v));
        }
    }
    check_tuple_conditions(s, q, a_q)
}

/// Conditions (a)-(c) only; set hygiene already established.
fn check_tuple_conditions(s: &[VertexId], q: &[VertexId], a_q: &ArcSet) -> Result<(), TupleError> {
    // (a) D_Q is a DAG.
    if !graphs::is_dag(a_q) {
        return Err(TupleError::NotADag);
    }
    // (b) every vertex of Q has a descendant in S: walk arcs backwards
    // from S.
    let mut reaches_s = vec![false; a_q.n()];
    let mut stack: Vec<usize> = s.to_vec();
    let mut into: Vec<Vec<usize>> = vec![Vec::new(); a_q.n()];
    for (u, v) in a_q.arcs() {
        into[v].push(u);
    }
    let mut seen = vec![false; a_q.n()];
    for &v in s {
        seen[v] = true;
    }
    while let Some(v) = stack.pop() {
        for &u in &into[v] {
            if !seen[u] {
                seen[u] = true;
                reaches_s[u] = true;
                stack.push(u);
            }
        }
    }
    if let Some(&v) = q.iter().find(|&&v| !reaches_s[v]) {
        return Err(TupleError::NoDescendantInS(v));
    }
    // (c) in Mo(D_Q), every vertex of Q has at most one neighbor outside S.
    let moral = moralize(a_q).expect("acyclicity was just checked");
    for &v in q {
        let outside = moral
            .graph()
            .neighbors(v)
            .into_iter()
            .filter(|w| s.binary_search(w).is_err())
            .count();
        if outside > 1 {
            return Err(TupleError::TooManyOutsideNeighbors(v));
        }
    }
    Ok(())
}

/// Splits `Q` into `Q0`/`Q1` by moral degree outside `S`, and collects the
/// remainder `R`. Precondition: `<Q, A_Q>` is an ancestor tuple for `S`.
pub fn partition(
    n: usize,
    s: &[VertexId],
    q: &[VertexId],
    a_q: &ArcSet,
) -> Result<TuplePartition, Pi1vError> {
    is_ancestor_tuple(s, q, a_q)?;
    let moral = moralize(a_q).expect("ancestor tuple implies acyclicity");
    let mut q0 = Vec::new();
    let mut q1 = Vec::new();
    for &v in q {
        let outside = moral
            .graph()
            .neighbors(v)
            .into_iter()
            .filter(|w| s.binary_search(w).is_err())
            .count();
        if outside == 0 {
            q0.push(v);
        } else {
            q1.push(v);
        }
    }
    let r = (0..n)
        .filter(|v| s.binary_search(v).is_err() && q.binary_search(v).is_err())
        .collect();
    Ok(TuplePartition { q0, q1, r })
}

/// Checks that `A_R` is suitable for `<Q, A_Q>`: all arcs point from
/// `S ∪ Q0 ∪ R` into `R`, and every vertex of `Q0 ∪ R` touches at most one
/// arc of `A_R ∩ ((R ∪ Q0) × R)`. Reports the first violated condition;
/// a `Tuple` error means the precondition itself failed.
pub fn is_suitable(
    a_r: &ArcSet,
    s: &[VertexId],
    q: &[VertexId],
    a_q: &ArcSet,
) -> Result<(), Pi1vError> {
    let part = partition(a_q.n(), s, q, a_q)?;
    check_suitable(a_r, &part).map_err(Pi1vError::Suitability)
}

fn check_suitable(a_r: &ArcSet, part: &TuplePartition) -> Result<(), SuitabilityError> {
    let in_r = |v: usize| part.r.binary_search(&v).is_ok();
    let in_q0 = |v: usize| part.q0.binary_search(&v).is_ok();
    let in_q1 = |v: usize| part.q1.binary_search(&v).is_ok();
    for (u, v) in a_r.arcs() {
        if !in_r(v) {
            return Err(SuitabilityError::HeadOutsideR(u, v));
        }
        if in_q1(u) {
            return Err(SuitabilityError::TailInQ1(u, v));
        }
    }
    let mut incident = vec![0usize; a_r.n()];
    for (u, v) in a_r.arcs() {
        // Arcs inside (R ∪ Q0) × R count against both endpoints.
        if in_r(u) || in_q0(u) {
            incident[u] += 1;
            incident[v] += 1;
        }
    }
    for &w in part.q0.iter().chain(part.r.iter()) {
        if incident[w] > 1 {
            return Err(SuitabilityError::TooManyIncidentArcs(w));
        }
    }
    Ok(())
}

/// Combines an ancestor tuple and a suitable arc set into the full DAG
/// `(N, A_Q ∪ A_R)`. The result is guaranteed acyclic with `S` a
/// dissociation set of its moralized graph; both are re-verified in debug
/// builds.
pub fn compose(
    s: &[VertexId],
    q: &[VertexId],
    a_q: &ArcSet,
    a_r: &ArcSet,
) -> Result<ArcSet, Pi1vError> {
    let part = partition(a_q.n(), s, q, a_q)?;
    check_suitable(a_r, &part).map_err(Pi1vError::Suitability)?;
    let dag = a_q.union(a_r);
    debug_assert!(graphs::is_dag(&dag));
    debug_assert!({
        let moral = moralize(&dag).unwrap();
        moral.graph().remove_vertices(s).max_degree() <= 1
    });
    Ok(dag)
}

/// Splits a DAG along a dissociation set `S` of its moralized graph:
/// `Q` collects the vertices outside `S` with a descendant in `S`,
/// `A_Q = A ∩ (S ∪ Q)²`, and `A_R` is the rest. The outputs always satisfy
/// the ancestor-tuple and suitability conditions, with `|Q| <= 2|S|`.
pub fn decompose(
    dag: &ArcSet,
    s: &[VertexId],
) -> Result<(Vec<VertexId>, ArcSet, ArcSet), Pi1vError> {
    if !graphs::is_dag(dag) {
        return Err(Pi1vError::InputNotADag);
    }
    if !sorted_unique(s) {
        return Err(Pi1vError::Tuple(TupleError::BadSets));
    }
    let moral = moralize(dag).expect("checked acyclic");
    if moral.graph().remove_vertices(s).max_degree() > 1 {
        return Err(Pi1vError::NotADissociationSet);
    }
    // Reverse reachability from S.
    let mut into: Vec<Vec<usize>> = vec![Vec::new(); dag.n()];
    for (u, v) in dag.arcs() {
        into[v].push(u);
    }
    let mut seen = vec![false; dag.n()];
    let mut ancestors = vec![false; dag.n()];
    let mut stack: Vec<usize> = s.to_vec();
    for &v in s {
        seen[v] = true;
    }
    while let Some(v) = stack.pop() {
        for &u in &into[v] {
            if !seen[u] {
                seen[u] = true;
                ancestors[u] = true;
                stack.push(u);
            }
        }
    }
    let q: Vec<usize> = (0..dag.n())
        .filter(|&v| ancestors[v] && s.binary_search(&v).is_err())
        .collect();
    let inside = |v: usize| s.binary_search(&v).is_ok() || q.binary_search(&v).is_ok();
    let mut a_q = ArcSet::empty(dag.n());
    let mut a_r = ArcSet::empty(dag.n());
    for (u, v) in dag.arcs() {
        if inside(u) && inside(v) {
            a_q.insert(u, v).unwrap();
        } else {
            a_r.insert(u, v).unwrap();
        }
    }
    assert!(q.len() <= 2 * s.len(), "ancestor bound |Q| <= 2|S| violated");
    debug_assert!(is_ancestor_tuple(s, &q, &a_q).is_ok());
    debug_assert!(is_suitable(&a_r, s, &q, &a_q).is_ok());
    Ok((q, a_q, a_r))
}

/// Result of completing an ancestor tuple: the optimal suitable arc set,
/// its score over `R`, and whether it meets the residual threshold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completion {
    pub a_r: ArcSet,
    pub score: Score,
    pub meets_threshold: bool,
}

/// Finds a suitable arc set maximizing the total score of `R` via maximum
/// weight matching, and reports whether it reaches `t_prime`.
pub fn solve_completion(
    instance: &Instance,
    s: &[VertexId],
    q: &[VertexId],
    a_q: &ArcSet,
    t_prime: Score,
) -> Result<Completion, Pi1vError> {
    let part = partition(instance.n(), s, q, a_q)?;
    let (score, parent_sets) = complete(instance, s, &part);
    let mut a_r = ArcSet::empty(instance.n());
    for (v, set) in &parent_sets {
        for &u in set.members() {
            a_r.insert(u, *v).unwrap();
        }
    }
    debug_assert!(check_suitable(&a_r, &part).is_ok());
    Ok(Completion {
        a_r,
        score,
        meets_threshold: score >= t_prime,
    })
}

/// The matching reduction. Vertices of the auxiliary graph are
/// `Q0 ∪ R ∪ R'` with `R'` a mirror copy of `R`; edges are
/// `X` (pairs inside `R`), `Y` (`R`-to-`Q0`), and `Z` (`v` to its mirror).
/// A `Z` edge stands for an `S`-only parent set, a `Y` edge for a parent
/// set reaching one `Q0` vertex, and an `X` edge for one arc between two
/// `R` vertices; matching edges are pairwise non-incident exactly when the
/// corresponding arc set is suitable.
fn complete(
    instance: &Instance,
    s: &[VertexId],
    part: &TuplePartition,
) -> (Score, Vec<(VertexId, ParentSet)>) {
    let q0 = &part.q0;
    let r = &part.r;
    let nr = r.len();
    let nq0 = q0.len();
    // Matching ids: Q0 first, then R, then the mirror R'.
    let q0_id = |i: usize| i;
    let r_id = |i: usize| nq0 + i;
    let mirror_id = |i: usize| nq0 + nr + i;

    // Best S-only parent set per R vertex; always defined (the empty set
    // qualifies).
    let z: Vec<(Score, ParentSet)> = r
        .iter()
        .map(|&v| instance.best_subset_score(v, s, &[]).unwrap())
        .collect();

    let mut edges = Vec::new();
    for (i, zi) in z.iter().enumerate() {
        edges.push((r_id(i), mirror_id(i), zi.0));
    }
    // Y edges: absent when no stored parent set of v contains w within S.
    let mut y_sets = std::collections::HashMap::new();
    for (i, &v) in r.iter().enumerate() {
        for (j, &w) in q0.iter().enumerate() {
            if let Ok((score, set)) = instance.best_subset_score(v, s, &[w]) {
                y_sets.insert((i, j), set);
                edges.push((r_id(i), q0_id(j), score));
            }
        }
    }
    // X edges: phi(u1, u2) pairs a parent set of u1 that reaches u2 with
    // the best S-only set of u2. Keep the better orientation.
    let mut x_sets = std::collections::HashMap::new();
    for i in 0..nr {
        for j in i + 1..nr {
            let (v, w) = (r[i], r[j]);
            let forward = instance.best_subset_score(v, s, &[w]).ok();
            let backward = instance.best_subset_score(w, s, &[v]).ok();
            let phi_fwd = forward.as_ref().map(|(sc, _)| sc + z[j].0);
            let phi_bwd = backward.as_ref().map(|(sc, _)| sc + z[i].0);
            let weight = match (phi_fwd, phi_bwd) {
                (None, None) => continue,
                (Some(a), None) => a,
                (None, Some(b)) => b,
                (Some(a), Some(b)) => a.max(b),
            };
            // Child choice per orientation; ties orient the arc toward the
            // lower-id vertex, which is v since i < j.
            let (child, set) = match (phi_fwd, phi_bwd) {
                (Some(a), Some(b)) if b > a => (j, backward.clone().unwrap().1),
                (Some(_), _) => (i, forward.clone().unwrap().1),
                (None, Some(_)) => (j, backward.clone().unwrap().1),
                (None, None) => unreachable!(),
            };
            x_sets.insert((i, j), (child, set));
            edges.push((r_id(i), r_id(j), weight));
        }
    }

    let graph = WeightedGraph::new(nq0 + 2 * nr, edges).expect("reduction builds a simple graph");
    let matching = max_weight_matching(&graph);

    // Reconstruct parent sets; unmatched R vertices take their best S-only
    // set, exactly as if their Z edge had been forced into the matching.
    let mut assigned: Vec<Option<ParentSet>> = vec![None; nr];
    for &(a, b, _) in &matching.edges {
        let (lo, hi) = (a.min(b), a.max(b));
        if lo < nq0 {
            // Y edge: hi is an R vertex, lo a Q0 vertex.
            let i = hi - nq0;
            let set = y_sets[&(i, lo)].clone();
            assigned[i] = Some(set);
        } else if hi >= nq0 + nr {
            // Z edge.
            let i = lo - nq0;
            assigned[i] = Some(z[i].1.clone());
        } else {
            // X edge between R vertices lo and hi.
            let (i, j) = (lo - nq0, hi - nq0);
            let (child, set) = x_sets[&(i, j)].clone();
            let other = if child == i { j } else { i };
            assigned[child] = Some(set);
            assigned[other] = Some(z[other].1.clone());
        }
    }
    let mut out = Vec::with_capacity(nr);
    let mut score: Score = 0;
    for (i, &v) in r.iter().enumerate() {
        let set = assigned[i].take().unwrap_or_else(|| z[i].1.clone());
        score += instance.table().score_of(v, &set);
        out.push((v, set));
    }
    (score, out)
}

/// One enumerated candidate, ordered so that the multiset minimum is the
/// highest score with the lexicographically smallest arc set (then smallest
/// `S`). The minimum of a fixed candidate set is schedule-independent, so
/// parallel runs are bit-identical to sequential ones.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Candidate {
    score: Score,
    arcs: ArcSet,
    s: Vec<VertexId>,
}

impl Candidate {
    fn better_than(&self, other: &Candidate) -> bool {
        (std::cmp::Reverse(self.score), &self.arcs, &self.s)
            < (std::cmp::Reverse(other.score), &other.arcs, &other.s)
    }
}

/// The exact solver: enumerates every `S` with `|S| <= k`, every
/// `Q ⊆ N∖S` with `|Q| <= 2|S|`, and every assignment of one potential
/// parent set (within `S ∪ Q`) per vertex of `S ∪ Q`; keeps the choices
/// that form an ancestor tuple and completes each optimally. Returns the
/// best DAG overall and the yes/no answer against `t`.
pub fn solve_pi1v(instance: &Instance) -> SolveResult {
    let k = instance.k();
    let pruned = instance.prune_parent_size(k + 1);
    let n = pruned.n();

    // Admissible per-vertex bound for branch pruning.
    let vbest: Vec<Score> = (0..n)
        .map(|v| {
            pruned
                .potential_parents(v)
                .unwrap()
                .into_iter()
                .map(|(_, s)| s)
                .max()
                .unwrap_or(0)
        })
        .collect();

    let mut s_choices: Vec<Vec<usize>> = Vec::new();
    for size in 0..=k.min(n) {
        s_choices.extend((0..n).combinations(size));
    }

    let incumbent = AtomicU64::new(0);
    let enumerated = AtomicU64::new(0);
    let completions = AtomicU64::new(0);

    let best = s_choices
        .par_iter()
        .map(|s| solve_for_s(&pruned, s, &vbest, &incumbent, &enumerated, &completions))
        .reduce(
            || None,
            |a, b| match (a, b) {
                (None, x) => x,
                (x, None) => x,
                (Some(x), Some(y)) => Some(if y.better_than(&x) { y } else { x }),
            },
        )
        .expect("S = {} is always enumerated");

    // Independent re-check: the witness moral graph lies in Pi1 + kv.
    let moral = moralize(&best.arcs).expect("solver output is a DAG");
    assert!(
        moral.graph().remove_vertices(&best.s).max_degree() <= 1,
        "witness dissociation set failed re-verification"
    );
    assert!(dissociation_set_at_most(moral.graph(), k).is_some());

    let mut result = SolveResult::new(
        instance.t(),
        best.score,
        best.arcs,
        ConstraintWitness::Dissociation(best.s),
    );
    result.telemetry = Telemetry {
        enumerated: enumerated.load(Ordering::Relaxed),
        completions: completions.load(Ordering::Relaxed),
        repetitions: 0,
    };
    result
}

// One candidate parent set of a tuple vertex, encoded over the positions of
// S ∪ Q: `mask` marks the members, `entry` indexes the stored table row
// (None for the empty set).
struct TupleCand {
    mask: u64,
    score: Score,
    entry: Option<usize>,
}

// Per-(S, Q) enumeration state. Positions index the sorted S ∪ Q list;
// parent-set choices live in bitmasks so the inner loop allocates nothing.
struct TupleSearch<'a> {
    instance: &'a Instance,
    s: &'a [usize],
    sq: Vec<usize>,
    s_mask: u64,
    cands: Vec<Vec<TupleCand>>,
    max_suffix: Vec<Score>,
    r: Vec<usize>,
    r_bound: Score,
    parents: Vec<u64>,
    chosen: Vec<usize>,
}

impl TupleSearch<'_> {
    // Acyclicity of the prefix graph by repeated source removal, and the
    // outside-S moral degree bound for Q positions. Both only get worse as
    // more positions are assigned, so a violation prunes the whole subtree.
    fn prefix_ok(&self, upto: usize) -> bool {
        let m = self.sq.len();
        let parent_mask = |v: usize| if v <= upto { self.parents[v] } else { 0 };
        // (a) acyclic: peel vertices whose remaining parents are gone.
        let mut alive: u64 = (1 << m) - 1;
        loop {
            let mut removed = false;
            let mut rest = alive;
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                if parent_mask(v) & alive == 0 {
                    alive &= !(1 << v);
                    removed = true;
                }
            }
            if alive == 0 {
                break;
            }
            if !removed {
                return false;
            }
        }
        // (c) moral degree outside S, restricted to assigned arcs.
        for qpos in 0..m {
            if self.s_mask & (1 << qpos) != 0 {
                continue;
            }
            let mut nb = parent_mask(qpos);
            for v in 0..=upto.min(m - 1) {
                let pm = parent_mask(v);
                if pm & (1 << qpos) != 0 {
                    // qpos is a parent of v: v is a neighbor, co-parents too.
                    nb |= (1 << v) | pm;
                }
            }
            nb &= !(1 << qpos);
            nb &= !self.s_mask;
            if nb.count_ones() > 1 {
                return false;
            }
        }
        true
    }

    // Condition (b) on the full assignment: every Q position reaches S.
    fn all_q_reach_s(&self) -> bool {
        let m = self.sq.len();
        let mut reach = self.s_mask;
        loop {
            let mut grown = false;
            for u in 0..m {
                if reach & (1 << u) != 0 {
                    continue;
                }
                // u reaches S if some child of u does.
                let is_parent_of_reached = (0..m).any(|v| {
                    reach & (1 << v) != 0 && self.parents[v] & (1 << u) != 0
                });
                if is_parent_of_reached {
                    reach |= 1 << u;
                    grown = true;
                }
            }
            if !grown {
                break;
            }
        }
        reach == (1 << m) - 1
    }

    fn moral_outside_degree(&self, qpos: usize) -> u32 {
        let m = self.sq.len();
        let mut nb = self.parents[qpos];
        for v in 0..m {
            if self.parents[v] & (1 << qpos) != 0 {
                nb |= (1 << v) | self.parents[v];
            }
        }
        nb &= !(1 << qpos);
        nb &= !self.s_mask;
        nb.count_ones()
    }
}

fn solve_for_s(
    instance: &Instance,
    s: &[usize],
    vbest: &[Score],
    incumbent: &AtomicU64,
    enumerated: &AtomicU64,
    completions: &AtomicU64,
) -> Option<Candidate> {
    let n = instance.n();
    let outside: Vec<usize> = (0..n).filter(|v| s.binary_search(v).is_err()).collect();
    let mut local_best: Option<Candidate> = None;
    let mut local_enumerated = 0u64;
    let mut local_completions = 0u64;

    for q_size in 0..=(2 * s.len()).min(outside.len()) {
        for q in outside.iter().copied().combinations(q_size) {
            let mut sq: Vec<usize> = s.iter().chain(q.iter()).copied().collect();
            sq.sort_unstable();
            let m = sq.len();
            assert!(m <= 60, "tuple too large for the bitmask encoding");
            let s_mask: u64 = sq
                .iter()
                .enumerate()
                .filter(|(_, v)| s.binary_search(v).is_ok())
                .fold(0, |acc, (i, _)| acc | (1 << i));

            // Candidate parent sets per tuple position, restricted to S ∪ Q.
            let cands: Vec<Vec<TupleCand>> = sq
                .iter()
                .map(|&v| {
                    let mut list = vec![TupleCand {
                        mask: 0,
                        score: instance.table().empty_score(v),
                        entry: None,
                    }];
                    for (ei, e) in instance.table().stored(v).iter().enumerate() {
                        let mut mask = 0u64;
                        let mut inside = true;
                        for &u in e.set.members() {
                            match sq.binary_search(&u) {
                                Ok(p) => mask |= 1 << p,
                                Err(_) => {
                                    inside = false;
                                    break;
                                }
                            }
                        }
                        if inside {
                            list.push(TupleCand {
                                mask,
                                score: e.score,
                                entry: Some(ei),
                            });
                        }
                    }
                    list
                })
                .collect();

            // Condition (b) needs every Q vertex on a path into S, so it
            // must appear in some candidate parent set of another vertex.
            let feasible = (0..m).all(|p| {
                s_mask & (1 << p) != 0
                    || cands
                        .iter()
                        .enumerate()
                        .any(|(v, list)| v != p && list.iter().any(|c| c.mask & (1 << p) != 0))
            });
            if !feasible {
                continue;
            }

            let r: Vec<usize> = outside
                .iter()
                .copied()
                .filter(|v| q.binary_search(v).is_err())
                .collect();
            let r_bound: Score = r.iter().map(|&v| vbest[v]).sum();
            let mut max_suffix = vec![0 as Score; m + 1];
            for pos in (0..m).rev() {
                let best = cands[pos].iter().map(|c| c.score).max().unwrap_or(0);
                max_suffix[pos] = max_suffix[pos + 1] + best;
            }

            let mut search = TupleSearch {
                instance,
                s,
                sq,
                s_mask,
                cands,
                max_suffix,
                r,
                r_bound,
                parents: vec![0; m],
                chosen: vec![0; m],
            };
            dfs_assign(
                &mut search,
                0,
                0,
                incumbent,
                &mut local_enumerated,
                &mut local_completions,
                &mut local_best,
            );
        }
    }
    enumerated.fetch_add(local_enumerated, Ordering::Relaxed);
    completions.fetch_add(local_completions, Ordering::Relaxed);
    local_best
}

fn dfs_assign(
    search: &mut TupleSearch<'_>,
    pos: usize,
    assigned: Score,
    incumbent: &AtomicU64,
    enumerated: &mut u64,
    completions: &mut u64,
    local_best: &mut Option<Candidate>,
) {
    let m = search.sq.len();
    // Admissible bound; strict inequality keeps every tie alive for the
    // lexicographic merge.
    if assigned + search.max_suffix[pos] + search.r_bound < incumbent.load(Ordering::Relaxed) {
        return;
    }
    if pos == m {
        *enumerated += 1;
        if !search.all_q_reach_s() {
            return;
        }
        emit_candidate(search, assigned, incumbent, completions, local_best);
        return;
    }
    for ci in 0..search.cands[pos].len() {
        let (mask, score) = {
            let c = &search.cands[pos][ci];
            (c.mask, c.score)
        };
        search.parents[pos] = mask;
        search.chosen[pos] = ci;
        if search.prefix_ok(pos) {
            dfs_assign(
                search,
                pos + 1,
                assigned + score,
                incumbent,
                enumerated,
                completions,
                local_best,
            );
        }
        search.parents[pos] = 0;
    }
}

fn emit_candidate(
    search: &TupleSearch<'_>,
    assigned: Score,
    incumbent: &AtomicU64,
    completions: &mut u64,
    local_best: &mut Option<Candidate>,
) {
    let instance = search.instance;
    let n = instance.n();
    let m = search.sq.len();
    if assigned + search.r_bound < incumbent.load(Ordering::Relaxed) {
        return;
    }
    // Materialize A_Q from the chosen table rows.
    let mut a_q = ArcSet::empty(n);
    for pos in 0..m {
        let v = search.sq[pos];
        if let Some(ei) = search.cands[pos][search.chosen[pos]].entry {
            for &u in instance.table().stored(v)[ei].set.members() {
                a_q.insert(u, v).unwrap();
            }
        }
    }
    let q0: Vec<usize> = (0..m)
        .filter(|&p| search.s_mask & (1 << p) == 0 && search.moral_outside_degree(p) == 0)
        .map(|p| search.sq[p])
        .collect();
    let part = TuplePartition {
        q0,
        q1: Vec::new(),
        r: search.r.clone(),
    };
    *completions += 1;
    let (r_score, parent_sets) = complete(instance, search.s, &part);
    let total = assigned + r_score;
    let mut arcs = a_q;
    for (v, set) in &parent_sets {
        for &u in set.members() {
            arcs.insert(u, *v).unwrap();
        }
    }
    let cand = Candidate {
        score: total,
        arcs,
        s: search.s.to_vec(),
    };
    incumbent.fetch_max(total, Ordering::Relaxed);
    let better = match &*local_best {
        None => true,
        Some(b) => cand.better_than(b),
    };
    if better {
        *local_best = Some(cand);
    }
}
