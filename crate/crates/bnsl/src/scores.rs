//! Instance data model: local scores in non-zero representation, potential
//! parent sets, the superstructure, threshold normalization, and the
//! subset-restricted score query that drives the matching reduction.

use crate::graphs::ArcSet;
use thiserror::Error;

/// Dense vertex index in `0..n`.
pub type VertexId = usize;

/// Local scores are nonnegative 64-bit integers. Exact integer comparisons
/// avoid any floating-point tie ambiguity; decimal score files are admitted
/// only through CLI scaling.
pub type Score = u64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScoreError {
    #[error("vertex id {0} out of range (n = {1})")]
    InvalidVertex(VertexId, usize),
    #[error("parent set of vertex {0} contains the vertex itself")]
    SelfParent(VertexId),
    #[error("duplicate parent set for vertex {0}")]
    DuplicateParentSet(VertexId),
    #[error("stored entry for vertex {0} has score 0; non-zero representation admits only positive entries")]
    ZeroEntry(VertexId),
    #[error("total score weight exceeds the 64-bit range")]
    Overflow,
    #[error("duplicate vertex name `{0}`")]
    DuplicateName(String),
    #[error("threshold {t} is below the empty-set total {offset}; the instance is a trivial yes-instance")]
    TrivialYes { t: Score, offset: Score },
    #[error("pool and forced sets must be sorted, duplicate-free, and disjoint from the child")]
    BadQuery,
    #[error("no stored parent set of vertex {0} satisfies the forced/pool constraint")]
    NoCandidate(VertexId),
}

/// A sorted, duplicate-free set of parent vertex ids. Never contains the
/// child vertex it is attached to.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ParentSet(Vec<VertexId>);

impl ParentSet {
    pub fn empty() -> Self {
        ParentSet(Vec::new())
    }

    /// Builds a parent set from arbitrary member order; sorts and rejects
    /// duplicates.
    pub fn new(mut members: Vec<VertexId>) -> Option<Self> {
        members.sort_unstable();
        if members.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some(ParentSet(members))
    }

    pub fn members(&self) -> &[VertexId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0.binary_search(&v).is_ok()
    }
}

impl std::fmt::Display for ParentSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// One stored triple of the non-zero representation: the member list plus
/// its positive score (cardinality is the list length).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreEntry {
    pub set: ParentSet,
    pub score: Score,
}

/// Per-vertex local scores. Nonempty sets are stored sparsely with positive
/// scores; the empty set always participates and carries an explicit score
/// (default 0). Entries are kept in canonical (cardinality, member) order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParentScoreTable {
    entries: Vec<Vec<ScoreEntry>>,
    empty: Vec<Score>,
}

impl ParentScoreTable {
    pub fn new(n: usize) -> Self {
        ParentScoreTable {
            entries: vec![Vec::new(); n],
            empty: vec![0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    /// Registers `f_v(set) = score` with `score > 0`, or an explicit
    /// empty-set score when `set` is empty.
    pub fn insert(&mut self, v: VertexId, set: ParentSet, score: Score) -> Result<(), ScoreError> {
        let n = self.n();
        if v >= n {
            return Err(ScoreError::InvalidVertex(v, n));
        }
        if set.contains(v) {
            return Err(ScoreError::SelfParent(v));
        }
        if let Some(&u) = set.members().iter().find(|&&u| u >= n) {
            return Err(ScoreError::InvalidVertex(u, n));
        }
        if set.is_empty() {
            self.empty[v] = score;
            return Ok(());
        }
        if score == 0 {
            return Err(ScoreError::ZeroEntry(v));
        }
        if self.entries[v].iter().any(|e| e.set == set) {
            return Err(ScoreError::DuplicateParentSet(v));
        }
        self.entries[v].push(ScoreEntry { set, score });
        Ok(())
    }

    pub fn stored(&self, v: VertexId) -> &[ScoreEntry] {
        &self.entries[v]
    }

    pub fn empty_score(&self, v: VertexId) -> Score {
        self.empty[v]
    }

    /// Score of an arbitrary parent set: stored value, explicit empty-set
    /// score, or 0 when the set is not stored.
    pub fn score_of(&self, v: VertexId, set: &ParentSet) -> Score {
        if set.is_empty() {
            return self.empty[v];
        }
        self.entries[v]
            .iter()
            .find(|e| &e.set == set)
            .map_or(0, |e| e.score)
    }

    fn canonicalize(&mut self) {
        for row in &mut self.entries {
            row.sort_by(|a, b| {
                (a.set.len(), a.set.members()).cmp(&(b.set.len(), b.set.members()))
            });
        }
    }

    fn weight_sum(&self) -> Option<u64> {
        let mut total: u64 = 0;
        for v in 0..self.n() {
            total = total.checked_add(self.empty[v])?;
            for e in &self.entries[v] {
                total = total.checked_add(e.score)?;
            }
        }
        Some(total)
    }
}

/// A full problem instance `(N, F, t, k)`: named vertices, local scores,
/// score threshold `t`, and budget `k`. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    names: Vec<String>,
    table: ParentScoreTable,
    t: Score,
    k: usize,
}

impl Instance {
    /// Validates invariants: contiguous ids, unique names, positive stored
    /// entries, and a total score weight that fits in 64 bits (which makes
    /// every downstream sum overflow-free).
    pub fn new(
        names: Vec<String>,
        mut table: ParentScoreTable,
        t: Score,
        k: usize,
    ) -> Result<Self, ScoreError> {
        assert_eq!(names.len(), table.n(), "names and table must agree on n");
        let mut seen = std::collections::HashSet::new();
        for name in &names {
            if !seen.insert(name.clone()) {
                return Err(ScoreError::DuplicateName(name.clone()));
            }
        }
        if table.weight_sum().is_none() {
            return Err(ScoreError::Overflow);
        }
        table.canonicalize();
        Ok(Instance {
            names,
            table,
            t,
            k,
        })
    }

    /// Convenience constructor with synthetic names `v0..v{n-1}`.
    pub fn with_default_names(
        table: ParentScoreTable,
        t: Score,
        k: usize,
    ) -> Result<Self, ScoreError> {
        let names = (0..table.n()).map(|i| format!("v{i}")).collect();
        Instance::new(names, table, t, k)
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v]
    }

    pub fn table(&self) -> &ParentScoreTable {
        &self.table
    }

    pub fn t(&self) -> Score {
        self.t
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Same scores, different threshold/budget.
    pub fn with_bounds(&self, t: Score, k: usize) -> Instance {
        Instance {
            names: self.names.clone(),
            table: self.table.clone(),
            t,
            k,
        }
    }

    /// All potential parent sets of `v`: the stored entries plus the empty
    /// set with its explicit score. The empty set appears exactly once, in
    /// first position.
    pub fn potential_parents(&self, v: VertexId) -> Result<Vec<(ParentSet, Score)>, ScoreError> {
        if v >= self.n() {
            return Err(ScoreError::InvalidVertex(v, self.n()));
        }
        let mut out = Vec::with_capacity(1 + self.table.stored(v).len());
        out.push((ParentSet::empty(), self.table.empty_score(v)));
        out.extend(
            self.table
                .stored(v)
                .iter()
                .map(|e| (e.set.clone(), e.score)),
        );
        Ok(out)
    }

    /// `delta_F`: the maximum number of potential parent sets over all
    /// vertices. At least 1, since the empty set always counts.
    pub fn delta(&self) -> usize {
        (0..self.n())
            .map(|v| self.table.stored(v).len() + 1)
            .max()
            .unwrap_or(1)
    }

    /// The superstructure: arc `(u, v)` iff `u` occurs in some stored
    /// parent set of `v`.
    pub fn superstructure(&self) -> Superstructure {
        let mut arcs = Vec::new();
        for v in 0..self.n() {
            for e in self.table.stored(v) {
                for &u in e.set.members() {
                    arcs.push((u, v));
                }
            }
        }
        Superstructure {
            arcs: ArcSet::from_arcs(self.n(), arcs).expect("table invariants forbid self-loops"),
        }
    }

    /// Removes every stored entry with more than `limit` members. Used with
    /// `limit = k + 1` before the dissociation solver: a larger parent set
    /// would force a clique of size `k + 3` in the moralized graph.
    pub fn prune_parent_size(&self, limit: usize) -> Instance {
        let mut table = ParentScoreTable::new(self.n());
        table.empty = self.table.empty.clone();
        for v in 0..self.n() {
            table.entries[v] = self
                .table
                .stored(v)
                .iter()
                .filter(|e| e.set.len() <= limit)
                .cloned()
                .collect();
        }
        Instance {
            names: self.names.clone(),
            table,
            t: self.t,
            k: self.k,
        }
    }

    /// Shifts every vertex's scores by its empty-set score, so that all
    /// empty-set scores become 0. Entries reduced to 0 or below are dropped.
    /// Returns the normalized instance and the offset `sum_v f_v({})`;
    /// optima of the arc-bounded problem shift down by exactly the offset.
    ///
    /// Errors with [`ScoreError::TrivialYes`] when `t` is below the offset:
    /// the empty arc set then already meets the threshold.
    pub fn normalize(&self) -> Result<(Instance, Score), ScoreError> {
        let offset = self.empty_total();
        if self.t < offset {
            return Err(ScoreError::TrivialYes { t: self.t, offset });
        }
        Ok((self.normalized_scores(self.t - offset), offset))
    }

    /// Sum of all explicit empty-set scores.
    pub fn empty_total(&self) -> Score {
        self.table.empty.iter().sum()
    }

    pub(crate) fn normalized_scores(&self, new_t: Score) -> Instance {
        let mut table = ParentScoreTable::new(self.n());
        for v in 0..self.n() {
            let base = self.table.empty_score(v);
            for e in self.table.stored(v) {
                if e.score > base {
                    table.entries[v].push(ScoreEntry {
                        set: e.set.clone(),
                        score: e.score - base,
                    });
                }
            }
        }
        Instance {
            names: self.names.clone(),
            table,
            t: new_t,
            k: self.k,
        }
    }

    /// Maximum of `f_v(P)` over potential parent sets `P` of `v` with
    /// `forced ⊆ P ⊆ pool ∪ forced`, together with one maximizing set.
    /// The empty set participates when `forced` is empty. Among maximizing
    /// sets the lexicographically smallest member list wins, so outputs are
    /// stable across runs and platforms.
    ///
    /// `pool` and `forced` must be sorted, duplicate-free, disjoint from
    /// each other and from `v`.
    pub fn best_subset_score(
        &self,
        v: VertexId,
        pool: &[VertexId],
        forced: &[VertexId],
    ) -> Result<(Score, ParentSet), ScoreError> {
        if v >= self.n() {
            return Err(ScoreError::InvalidVertex(v, self.n()));
        }
        if !sorted_unique(pool) || !sorted_unique(forced) {
            return Err(ScoreError::BadQuery);
        }
        if pool.binary_search(&v).is_ok()
            || forced.binary_search(&v).is_ok()
            || forced.iter().any(|f| pool.binary_search(f).is_ok())
        {
            return Err(ScoreError::BadQuery);
        }

        let mut best: Option<(Score, &ParentSet)> = None;
        for e in self.table.stored(v) {
            if !admissible(e.set.members(), pool, forced) {
                continue;
            }
            let better = match best {
                None => true,
                Some((s, set)) => {
                    e.score > s || (e.score == s && e.set.members() < set.members())
                }
            };
            if better {
                best = Some((e.score, &e.set));
            }
        }
        if forced.is_empty() {
            // The empty candidate always qualifies here.
            let empty_score = self.table.empty_score(v);
            let better = match best {
                None => true,
                Some((s, _)) => empty_score >= s,
            };
            if better {
                return Ok((empty_score, ParentSet::empty()));
            }
        }
        match best {
            Some((s, set)) => Ok((s, set.clone())),
            None => Err(ScoreError::NoCandidate(v)),
        }
    }
}

/// Directed graph with arc `(u, v)` iff `u` is a potential parent of `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Superstructure {
    pub arcs: ArcSet,
}

fn sorted_unique(xs: &[VertexId]) -> bool {
    xs.windows(2).all(|w| w[0] < w[1])
}

/// Merge-scan containment test: `forced ⊆ p ⊆ pool ∪ forced`. All three
/// slices sorted ascending.
fn admissible(p: &[VertexId], pool: &[VertexId], forced: &[VertexId]) -> bool {
    // Every forced member appears in p.
    let mut i = 0;
    for &f in forced {
        while i < p.len() && p[i] < f {
            i += 1;
        }
        if i == p.len() || p[i] != f {
            return false;
        }
    }
    // Every member of p lies in pool or forced.
    let (mut a, mut b) = (0, 0);
    for &x in p {
        while a < pool.len() && pool[a] < x {
            a += 1;
        }
        if a < pool.len() && pool[a] == x {
            continue;
        }
        while b < forced.len() && forced[b] < x {
            b += 1;
        }
        if b < forced.len() && forced[b] == x {
            continue;
        }
        return false;
    }
    true
}
