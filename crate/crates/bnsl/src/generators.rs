//! Instance generators: the hardness reductions, which produce instances
//! with known yes/no status from graph inputs, and seeded random instances.

use crate::graphs::Graph;
use crate::scores::{Instance, ParentScoreTable, ParentSet, Score, ScoreError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::ops::RangeInclusive;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("reduction requires at least {0} color classes, got {1}")]
    TooFewClasses(usize, usize),
    #[error("classes must be disjoint, nonempty, and cover every vertex")]
    BadClasses,
    #[error("reduction requires a properly colored graph: edge ({0}, {1}) stays within one class")]
    ImproperColoring(usize, usize),
    #[error("infeasible parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Score(#[from] ScoreError),
}

/// An undirected graph whose vertices are partitioned into color classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredGraph {
    graph: Graph,
    classes: Vec<Vec<usize>>,
}

impl ColoredGraph {
    /// `class_of[v]` is the 0-based class index of vertex `v`. Classes must
    /// be nonempty and cover every vertex.
    pub fn new(graph: Graph, class_of: &[usize], num_classes: usize) -> Result<Self, GenError> {
        if class_of.len() != graph.n() || num_classes == 0 {
            return Err(GenError::BadClasses);
        }
        let mut classes = vec![Vec::new(); num_classes];
        for (v, &c) in class_of.iter().enumerate() {
            if c >= num_classes {
                return Err(GenError::BadClasses);
            }
            classes[c].push(v);
        }
        if classes.iter().any(|c| c.is_empty()) {
            return Err(GenError::BadClasses);
        }
        Ok(ColoredGraph { graph, classes })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, v: usize) -> usize {
        self.classes
            .iter()
            .position(|c| c.binary_search(&v).is_ok())
            .expect("classes cover every vertex")
    }

    fn require_proper(&self) -> Result<(), GenError> {
        for (u, v) in self.graph.edges() {
            if self.class_of(u) == self.class_of(v) {
                return Err(GenError::ImproperColoring(u, v));
            }
        }
        Ok(())
    }
}

fn binom2(x: usize) -> usize {
    x * (x.saturating_sub(1)) / 2
}

/// Clique reduction, targeting the dissociation-constrained problem. The
/// output is a yes-instance iff `g` has a clique of size `ell`: vertices are
/// `V` plus two copies `e1`, `e2` of every edge, the only positive scores
/// are `f_{e1}({e2, u, v}) = 1` for `e = {u, v}`, and the bounds are
/// `t = C(ell, 2)`, `k = ell`. The superstructure is always a DAG and the
/// maximum parent set size is three.
pub fn from_clique(g: &Graph, ell: usize) -> Result<Instance, GenError> {
    if ell < 2 {
        return Err(GenError::BadParams("clique size must be at least 2".into()));
    }
    let nv = g.n();
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let m = edges.len();
    let mut names: Vec<String> = (0..nv).map(|i| format!("v{i}")).collect();
    names.extend(edges.iter().map(|(u, v)| format!("e1:{u}-{v}")));
    names.extend(edges.iter().map(|(u, v)| format!("e2:{u}-{v}")));

    let mut table = ParentScoreTable::new(nv + 2 * m);
    for (j, &(u, v)) in edges.iter().enumerate() {
        let e1 = nv + j;
        let e2 = nv + m + j;
        table.insert(e1, ParentSet::new(vec![e2, u, v]).unwrap(), 1)?;
    }
    let t = binom2(ell) as Score;
    let instance = Instance::new(names, table, t, ell)?;
    debug_assert!(crate::graphs::is_dag(&instance.superstructure().arcs));
    Ok(instance)
}

/// Hamiltonian path reduction, targeting maximum moral degree two at
/// budget zero: `f_v({w}) = 1` for every graph neighbor `w`, with
/// `t = n - 1` and `k = 0`.
pub fn from_hampath(g: &Graph) -> Result<Instance, GenError> {
    let n = g.n();
    let mut table = ParentScoreTable::new(n);
    for v in 0..n {
        for w in g.neighbors(v) {
            table.insert(v, ParentSet::new(vec![w]).unwrap(), 1)?;
        }
    }
    let t = n.saturating_sub(1) as Score;
    Ok(Instance::with_default_names(table, t, 0)?)
}

/// Triangle cover reduction, targeting components of size at most three at
/// budget zero: `f_v({w}) = 1` for neighbors, `f_v({u, w}) = n` for
/// neighbor pairs, `t = (n² + n)/3`, `k = 0`. When `3` does not divide `n`
/// no perfect packing exists; the threshold is rounded up, which keeps the
/// instance an immediate no-instance in that case.
pub fn from_triangle_cover(g: &Graph) -> Result<Instance, GenError> {
    let n = g.n();
    let mut table = ParentScoreTable::new(n);
    for v in 0..n {
        let nb = g.neighbors(v);
        for &w in &nb {
            table.insert(v, ParentSet::new(vec![w]).unwrap(), 1)?;
        }
        for i in 0..nb.len() {
            for j in i + 1..nb.len() {
                table.insert(v, ParentSet::new(vec![nb[i], nb[j]]).unwrap(), n as Score)?;
            }
        }
    }
    let t = ((n * n + n) as Score).div_ceil(3);
    Ok(Instance::with_default_names(table, t, 0)?)
}

/// Multicolored clique reduction, targeting at most `k` moral edges. One
/// vertex `w_{i,j}` per class pair plus a central vertex `x`;
/// `f_{w_{i,j}}({u, v, x}) = 1` for every edge between classes `i` and `j`.
/// Bounds: `t = C(l, 2)`, `k = 4*C(l, 2) + l`.
pub fn from_multicolored_clique(cg: &ColoredGraph) -> Result<Instance, GenError> {
    let ell = cg.classes.len();
    if ell < 2 {
        return Err(GenError::TooFewClasses(2, ell));
    }
    cg.require_proper()?;
    let nv = cg.graph.n();
    let pairs: Vec<(usize, usize)> = (0..ell)
        .flat_map(|i| (i + 1..ell).map(move |j| (i, j)))
        .collect();
    let pair_index = |i: usize, j: usize| {
        let (a, b) = (i.min(j), i.max(j));
        pairs
            .iter()
            .position(|&(x, y)| (x, y) == (a, b))
            .expect("all pairs present")
    };
    let x = nv + pairs.len();
    let mut names: Vec<String> = (0..nv).map(|i| format!("v{i}")).collect();
    names.extend(pairs.iter().map(|(i, j)| format!("w{{{},{}}}", i + 1, j + 1)));
    names.push("x".to_string());

    let mut table = ParentScoreTable::new(nv + pairs.len() + 1);
    for (u, v) in cg.graph.edges() {
        let (cu, cv) = (cg.class_of(u), cg.class_of(v));
        debug_assert_ne!(cu, cv, "properness was validated");
        let w = nv + pair_index(cu, cv);
        table.insert(w, ParentSet::new(vec![u, v, x]).unwrap(), 1)?;
    }
    let t = binom2(ell) as Score;
    let k = 4 * binom2(ell) + ell;
    let instance = Instance::new(names, table, t, k)?;
    debug_assert!(crate::graphs::is_dag(&instance.superstructure().arcs));
    Ok(instance)
}

/// Multicolored independent set reduction, targeting the plain arc-bounded
/// problem with a vacuous budget. Vertices are the first `l - 1` classes
/// plus `x`; a class vertex scores 1 exactly for the parent set pairing its
/// whole class with its non-`C_l` neighborhood and `x`, while `x` scores 1
/// for each neighborhood of a `C_l` vertex. Bounds: `t = l`, `k = |N|²`.
pub fn from_multicolored_independent_set(cg: &ColoredGraph) -> Result<Instance, GenError> {
    let ell = cg.classes.len();
    if ell < 2 {
        return Err(GenError::TooFewClasses(2, ell));
    }
    cg.require_proper()?;
    let last = &cg.classes[ell - 1];
    let kept: Vec<usize> = (0..cg.graph.n())
        .filter(|v| last.binary_search(v).is_err())
        .collect();
    let id_of = |v: usize| kept.binary_search(&v).expect("kept vertex");
    let x = kept.len();
    let n_new = kept.len() + 1;

    let mut names: Vec<String> = kept.iter().map(|v| format!("v{v}")).collect();
    names.push("x".to_string());

    let mut table = ParentScoreTable::new(n_new);
    for class in cg.classes.iter().take(ell - 1) {
        for &v in class {
            let mut members: Vec<usize> = class
                .iter()
                .filter(|&&u| u != v)
                .map(|&u| id_of(u))
                .collect();
            for w in cg.graph.neighbors(v) {
                if last.binary_search(&w).is_err() {
                    members.push(id_of(w));
                }
            }
            members.push(x);
            members.sort_unstable();
            members.dedup();
            table.insert(id_of(v), ParentSet::new(members).unwrap(), 1)?;
        }
    }
    let mut seen = std::collections::HashSet::new();
    for &w in last {
        let members: Vec<usize> = cg.graph.neighbors(w).into_iter().map(id_of).collect();
        let set = ParentSet::new(members).unwrap();
        if seen.insert(set.clone()) {
            table.insert(x, set, 1)?;
        }
    }
    let t = ell as Score;
    let k = n_new * n_new;
    Ok(Instance::new(names, table, t, k)?)
}

/// Seeded random instance: `entries_per_vertex` distinct parent sets per
/// vertex with 1 to `max_parents` members and scores uniform in
/// `score_range`. Reproducible across platforms. Threshold and budget start
/// at zero; use [`Instance::with_bounds`] to set them.
pub fn random_instance(
    n: usize,
    max_parents: usize,
    entries_per_vertex: usize,
    score_range: RangeInclusive<Score>,
    seed: u64,
) -> Result<Instance, GenError> {
    if n == 0 || max_parents == 0 || max_parents >= n {
        return Err(GenError::BadParams(format!(
            "need 1 <= max_parents < n, got n = {n}, max_parents = {max_parents}"
        )));
    }
    let (lo, hi) = (*score_range.start(), *score_range.end());
    if lo == 0 || lo > hi {
        return Err(GenError::BadParams(format!(
            "score range must satisfy 1 <= lo <= hi, got {lo}..={hi}"
        )));
    }
    // Enough distinct sets to satisfy the request?
    let mut available: u128 = 0;
    for size in 1..=max_parents {
        let mut c: u128 = 1;
        for i in 0..size {
            c = c.saturating_mul((n - 1 - i) as u128) / (i as u128 + 1);
        }
        available = available.saturating_add(c);
    }
    if available < entries_per_vertex as u128 {
        return Err(GenError::BadParams(format!(
            "cannot place {entries_per_vertex} distinct parent sets with n = {n}, max_parents = {max_parents}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = ParentScoreTable::new(n);
    for v in 0..n {
        let others: Vec<usize> = (0..n).filter(|&u| u != v).collect();
        let mut sets = std::collections::HashSet::new();
        let mut attempts = 0usize;
        while sets.len() < entries_per_vertex {
            attempts += 1;
            assert!(
                attempts < 1000 * (entries_per_vertex + 1),
                "sampling stalled despite feasible parameters"
            );
            let size = rng.gen_range(1..=max_parents);
            let mut pool = others.clone();
            // Partial Fisher-Yates for a uniform size-subset.
            for i in 0..size {
                let j = rng.gen_range(i..pool.len());
                pool.swap(i, j);
            }
            let set = ParentSet::new(pool[..size].to_vec()).unwrap();
            if sets.insert(set.clone()) {
                let score = rng.gen_range(lo..=hi);
                table.insert(v, set, score)?;
            }
        }
    }
    Ok(Instance::with_default_names(table, 0, 0)?)
}
