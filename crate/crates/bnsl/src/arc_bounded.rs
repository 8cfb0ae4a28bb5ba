//! Solvers for networks with at most `k` arcs (topological dynamic program
//! when the superstructure is acyclic, randomized color coding otherwise)
//! and the brute force for networks whose moralized graph has at most `k`
//! edges.

use crate::graphs::{self, moralize, ArcSet};
use crate::scores::{Instance, ParentSet, Score};
use crate::solve::{ConstraintWitness, SolveResult, Telemetry};
use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ArcBoundedError {
    #[error("the superstructure contains a directed cycle; the topological solver does not apply")]
    CyclicSuperstructure,
    #[error("instance is not normalized: vertex {0} has empty-set score {1}")]
    NotNormalized(usize, Score),
    #[error("bad coloring: {0}")]
    BadColoring(String),
    #[error("{0} colors exceed the supported subset-DP width")]
    TooManyColors(usize),
    #[error("color coding requires a positive arc budget")]
    ZeroBudget,
}

/// A total function assigning one of `num_colors` colors (0-based) to every
/// vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    colors: Vec<usize>,
    num_colors: usize,
}

impl Coloring {
    pub fn new(colors: Vec<usize>, num_colors: usize) -> Result<Self, ArcBoundedError> {
        if num_colors == 0 {
            return Err(ArcBoundedError::BadColoring("need at least one color".into()));
        }
        if let Some(&c) = colors.iter().find(|&&c| c >= num_colors) {
            return Err(ArcBoundedError::BadColoring(format!(
                "color {c} out of range 0..{num_colors}"
            )));
        }
        Ok(Coloring { colors, num_colors })
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn num_colors(&self) -> usize {
        self.num_colors
    }

    pub fn of(&self, v: usize) -> usize {
        self.colors[v]
    }
}

/// An arc set is color-loyal when (a) no arc connects two vertices of one
/// color class and (b) at most one vertex per class has a nonempty parent
/// set.
pub fn color_loyal(arcs: &ArcSet, chi: &Coloring) -> bool {
    for (u, v) in arcs.arcs() {
        if chi.of(u) == chi.of(v) {
            return false;
        }
    }
    let mut has_parents = vec![false; arcs.n()];
    for (_, v) in arcs.arcs() {
        has_parents[v] = true;
    }
    let mut parents_per_class = vec![0usize; chi.num_colors()];
    for v in 0..arcs.n() {
        if has_parents[v] {
            parents_per_class[chi.of(v)] += 1;
            if parents_per_class[chi.of(v)] > 1 {
                return false;
            }
        }
    }
    true
}

/// Dynamic program over a topological order of the superstructure. Vertices
/// are relabeled so that every superstructure arc points from a higher to a
/// lower label; `T[i][j]` is then the best score of the last `i` labels
/// using at most `j` arcs, and each vertex picks its parent set
/// independently. Cyclic superstructures get an unsupported signal so
/// callers can fall back to color coding.
pub fn solve_ba_topological(instance: &Instance) -> Result<SolveResult, ArcBoundedError> {
    let n = instance.n();
    let superstructure = instance.superstructure();
    let topo = graphs::topological_order(&superstructure.arcs)
        .map_err(|_| ArcBoundedError::CyclicSuperstructure)?;

    // Budget beyond the largest usable arc count only wastes table columns.
    let max_useful: usize = (0..n)
        .map(|v| {
            instance
                .table()
                .stored(v)
                .iter()
                .map(|e| e.set.len())
                .max()
                .unwrap_or(0)
        })
        .sum();
    let k = instance.k().min(max_useful);

    // topo[0] gets the highest label; processing in reverse topological
    // order makes every potential parent already-labeled-higher.
    let order: Vec<usize> = topo.into_iter().rev().collect();

    let mut table = vec![vec![0 as Score; k + 1]; n + 1];
    for i in 1..=n {
        let v = order[i - 1];
        let cands = instance.potential_parents(v).unwrap();
        for j in 0..=k {
            let mut best = 0;
            for (set, score) in &cands {
                if set.len() <= j {
                    let val = score + table[i - 1][j - set.len()];
                    if val > best {
                        best = val;
                    }
                }
            }
            table[i][j] = best;
        }
    }

    // Traceback, taking the first candidate (canonical order) that achieves
    // each table entry.
    let mut arcs = ArcSet::empty(n);
    let mut j = k;
    for i in (1..=n).rev() {
        let v = order[i - 1];
        let cands = instance.potential_parents(v).unwrap();
        let target = table[i][j];
        let (set, _) = cands
            .iter()
            .find(|(set, score)| set.len() <= j && score + table[i - 1][j - set.len()] == target)
            .expect("table entry must be witnessed");
        for &u in set.members() {
            arcs.insert(u, v).unwrap();
        }
        j -= set.len();
    }

    let score = table[n][k];
    assert!(arcs.len() <= instance.k());
    assert!(graphs::is_dag(&arcs));
    let arc_count = arcs.len();
    let mut result = SolveResult::new(
        instance.t(),
        score,
        arcs,
        ConstraintWitness::ArcCount(arc_count),
    );
    result.telemetry.enumerated = ((n + 1) * (k + 1)) as u64;
    Ok(result)
}

// Per-entry data prepared for the colored DP: the color mask of the
// members, the cardinality, and the score.
struct ColoredEntry {
    color_mask: u32,
    len: usize,
    score: Score,
    set: ParentSet,
}

const MAX_COLORS: usize = 20;

/// Subset DP for the color-loyal restriction. `T[C'][k']` is the best score
/// obtainable inside the color classes of `C'` with at most `k'` arcs by a
/// color-loyal arc set; peeling a class `c` chooses the single vertex of
/// that class that takes a (possibly empty) parent set colored within the
/// remaining classes.
///
/// Requires a normalized instance (every empty-set score 0) and at most
/// `2k` colors.
pub fn solve_colored_ba(
    instance: &Instance,
    chi: &Coloring,
) -> Result<SolveResult, ArcBoundedError> {
    for v in 0..instance.n() {
        let e = instance.table().empty_score(v);
        if e != 0 {
            return Err(ArcBoundedError::NotNormalized(v, e));
        }
    }
    if chi.num_colors() > 2 * instance.k().max(1) {
        return Err(ArcBoundedError::BadColoring(format!(
            "{} colors exceed 2k = {}",
            chi.num_colors(),
            2 * instance.k()
        )));
    }
    let (score, arcs) = colored_dp(instance, chi)?;
    assert!(color_loyal(&arcs, chi));
    assert!(arcs.len() <= instance.k());
    assert!(graphs::is_dag(&arcs));
    let mut result = SolveResult::new(
        instance.t(),
        score,
        arcs,
        ConstraintWitness::Coloring(chi.colors().to_vec()),
    );
    result.telemetry.enumerated = (1u64 << chi.num_colors()) * (instance.k() as u64 + 1);
    Ok(result)
}

// The recurrence itself, independent of normalization: the class sum of
// empty-set scores is carried along so the table stays correct even on
// unnormalized scores.
fn colored_dp(instance: &Instance, chi: &Coloring) -> Result<(Score, ArcSet), ArcBoundedError> {
    let n = instance.n();
    let c = chi.num_colors();
    if chi.colors().len() != n {
        return Err(ArcBoundedError::BadColoring(format!(
            "coloring covers {} of {} vertices",
            chi.colors().len(),
            n
        )));
    }
    if c > MAX_COLORS {
        return Err(ArcBoundedError::TooManyColors(c));
    }
    let k = instance.k();
    let full: usize = (1 << c) - 1;

    let mut classes: Vec<Vec<usize>> = vec![Vec::new(); c];
    for v in 0..n {
        classes[chi.of(v)].push(v);
    }
    let empty_sum: Vec<Score> = classes
        .iter()
        .map(|vs| vs.iter().map(|&w| instance.table().empty_score(w)).sum())
        .collect();

    let entries: Vec<Vec<ColoredEntry>> = (0..n)
        .map(|v| {
            instance
                .potential_parents(v)
                .unwrap()
                .into_iter()
                .map(|(set, score)| ColoredEntry {
                    color_mask: set
                        .members()
                        .iter()
                        .fold(0u32, |m, &u| m | (1 << chi.of(u))),
                    len: set.len(),
                    score,
                    set,
                })
                .collect()
        })
        .collect();

    // dp[mask][j]; choice records (color, vertex, entry index) or None for
    // base/empty cells.
    let width = k + 1;
    let mut dp = vec![0 as Score; (full + 1) * width];
    let mut choice: Vec<Option<(usize, usize, usize)>> = vec![None; (full + 1) * width];
    let cell = |mask: usize, j: usize| mask * width + j;

    for mask in 1..=full {
        if mask.count_ones() == 1 {
            let color = mask.trailing_zeros() as usize;
            for j in 0..=k {
                dp[cell(mask, j)] = empty_sum[color];
            }
            continue;
        }
        for j in 0..=k {
            let mut best: Option<Score> = None;
            let mut best_choice = None;
            for color in 0..c {
                if mask & (1 << color) == 0 {
                    continue;
                }
                let rest = mask ^ (1 << color);
                let allowed = rest as u32;
                for &v in &classes[color] {
                    let class_rest = empty_sum[color] - instance.table().empty_score(v);
                    for (ei, e) in entries[v].iter().enumerate() {
                        if e.len > j || e.color_mask & !allowed != 0 {
                            continue;
                        }
                        let val = dp[cell(rest, j - e.len)] + e.score + class_rest;
                        if best.is_none_or(|b| val > b) {
                            best = Some(val);
                            best_choice = Some((color, v, ei));
                        }
                    }
                }
            }
            // No candidate only when every class in the mask is empty.
            dp[cell(mask, j)] = best.unwrap_or(0);
            choice[cell(mask, j)] = best_choice;
        }
    }

    let score = dp[cell(full, k)];
    let mut arcs = ArcSet::empty(n);
    let mut mask = full;
    let mut j = k;
    while mask.count_ones() > 1 {
        match choice[cell(mask, j)] {
            Some((color, v, ei)) => {
                let e = &entries[v][ei];
                for &u in e.set.members() {
                    arcs.insert(u, v).unwrap();
                }
                j -= e.len;
                mask ^= 1 << color;
            }
            None => break, // remaining classes are empty
        }
    }
    Ok((score, arcs))
}

/// Randomized color-coding solver for the arc-bounded problem: normalize,
/// color uniformly with `min(2k, n)` colors, solve the color-loyal
/// restriction, and repeat `ceil(e^{2k})` times (or `repetitions`). Returns
/// the best witness found; never answers yes on a no-instance, and answers
/// yes on a yes-instance with probability at least `1 - 1/e` under the
/// default repetition count. Deterministic given the seed.
pub fn solve_ba_color_coding(
    instance: &Instance,
    seed: u64,
    repetitions: Option<u64>,
) -> Result<SolveResult, ArcBoundedError> {
    let k = instance.k();
    if k == 0 {
        return Err(ArcBoundedError::ZeroBudget);
    }
    let n = instance.n();
    let offset = instance.empty_total();
    let norm = instance.normalized_scores(instance.t().saturating_sub(offset));
    let c = (2 * k).min(n).max(1);
    if c > MAX_COLORS {
        return Err(ArcBoundedError::TooManyColors(c));
    }
    let reps = repetitions.unwrap_or_else(|| ((2 * k) as f64).exp().ceil() as u64);

    let best = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(rep);
            let colors: Vec<usize> = (0..n).map(|_| rng.gen_range(0..c)).collect();
            let chi = Coloring::new(colors, c).unwrap();
            let (score, arcs) = colored_dp(&norm, &chi).expect("guards already checked");
            (score, rep, arcs, chi)
        })
        .reduce_with(|a, b| {
            // Highest score wins; ties keep the earliest repetition, so the
            // outcome is identical for any thread count.
            let ka = (std::cmp::Reverse(a.0), a.1);
            let kb = (std::cmp::Reverse(b.0), b.1);
            if kb < ka {
                b
            } else {
                a
            }
        });

    let (norm_score, _, arcs, chi) = match best {
        Some(b) => b,
        None => (0, 0, ArcSet::empty(n), Coloring::new(vec![0; n], c).unwrap()),
    };
    let score = norm_score + offset;
    debug_assert_eq!(
        score,
        arcs.parent_lists()
            .iter()
            .enumerate()
            .map(|(v, pa)| instance
                .table()
                .score_of(v, &ParentSet::new(pa.clone()).unwrap()))
            .sum::<Score>()
    );
    assert!(color_loyal(&arcs, &chi));
    assert!(arcs.len() <= k);
    assert!(graphs::is_dag(&arcs));

    let mut result = SolveResult::new(
        instance.t(),
        score,
        arcs,
        ConstraintWitness::Coloring(chi.colors().to_vec()),
    );
    result.telemetry = Telemetry {
        enumerated: 0,
        completions: 0,
        repetitions: reps,
    };
    Ok(result)
}

/// Brute force for a moralized graph with at most `k` edges: every
/// superstructure arc subset of size at most `k` is tested for acyclicity,
/// score, and moral edge count.
pub fn solve_pi0e(instance: &Instance) -> SolveResult {
    let n = instance.n();
    let superstructure = instance.superstructure();
    let all_arcs: Vec<(usize, usize)> = superstructure.arcs.arcs().collect();
    let k = instance.k();

    let mut best: Option<(Score, ArcSet, usize)> = None;
    let mut enumerated = 0u64;
    for size in 0..=k.min(all_arcs.len()) {
        for subset in all_arcs.iter().copied().combinations(size) {
            enumerated += 1;
            let arcs = ArcSet::from_arcs(n, subset).unwrap();
            if !graphs::is_dag(&arcs) {
                continue;
            }
            let moral = moralize(&arcs).unwrap();
            if moral.m() > k {
                continue;
            }
            let score: Score = arcs
                .parent_lists()
                .into_iter()
                .enumerate()
                .map(|(v, pa)| instance.table().score_of(v, &ParentSet::new(pa).unwrap()))
                .sum();
            let better = match &best {
                None => true,
                Some((bs, barcs, _)) => score > *bs || (score == *bs && arcs < *barcs),
            };
            if better {
                let m = moral.m();
                best = Some((score, arcs, m));
            }
        }
    }
    let (score, arcs, moral_edges) =
        best.expect("the empty arc set is always a candidate");
    let mut result = SolveResult::new(
        instance.t(),
        score,
        arcs,
        ConstraintWitness::MoralEdgeCount(moral_edges),
    );
    result.telemetry.enumerated = enumerated;
    result
}
