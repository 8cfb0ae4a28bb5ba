//! Directed and undirected graph utilities: acyclicity, topological order,
//! moralization, and membership checkers (with witnesses) for the sparse
//! graph classes the solvers target.

use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("arc ({0}, {1}) out of range (n = {2})")]
    ArcOutOfRange(usize, usize, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("input graph contains a directed cycle")]
    NotADag,
    #[error("unsupported class/mode/budget combination: {0}")]
    Unsupported(String),
}

/// A set of arcs over vertices `0..n`. Simple (at most one arc per ordered
/// pair), no self-loops. Ordered iteration and comparison throughout, so
/// arc sets can be tie-broken lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct ArcSet {
    n: usize,
    arcs: BTreeSet<(usize, usize)>,
}

impl ArcSet {
    pub fn empty(n: usize) -> Self {
        ArcSet {
            n,
            arcs: BTreeSet::new(),
        }
    }

    pub fn from_arcs(
        n: usize,
        arcs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut set = BTreeSet::new();
        for (u, v) in arcs {
            if u >= n || v >= n {
                return Err(GraphError::ArcOutOfRange(u, v, n));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            set.insert((u, v));
        }
        Ok(ArcSet { n, arcs: set })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.arcs.contains(&(u, v))
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.arcs.iter().copied()
    }

    pub fn insert(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        if u >= self.n || v >= self.n {
            return Err(GraphError::ArcOutOfRange(u, v, self.n));
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        self.arcs.insert((u, v));
        Ok(())
    }

    /// Parent list of `v`, sorted ascending.
    pub fn parents(&self, v: usize) -> Vec<usize> {
        self.arcs
            .iter()
            .filter(|&&(_, w)| w == v)
            .map(|&(u, _)| u)
            .collect()
    }

    /// Per-vertex parent lists in one pass.
    pub fn parent_lists(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n];
        for &(u, v) in &self.arcs {
            out[v].push(u);
        }
        for row in &mut out {
            row.sort_unstable();
        }
        out
    }

    pub fn union(&self, other: &ArcSet) -> ArcSet {
        assert_eq!(self.n, other.n);
        let mut arcs = self.arcs.clone();
        arcs.extend(other.arcs.iter().copied());
        ArcSet { n: self.n, arcs }
    }
}

/// True iff the arc set contains no directed cycle. Linear time.
pub fn is_dag(arcs: &ArcSet) -> bool {
    topological_order(arcs).is_ok()
}

/// Topological order when acyclic (smallest-id-first among ready vertices,
/// so the result is deterministic), or a cycle witness otherwise.
pub fn topological_order(arcs: &ArcSet) -> Result<Vec<usize>, Vec<usize>> {
    let n = arcs.n();
    let mut indeg = vec![0usize; n];
    let mut out_adj = vec![Vec::new(); n];
    for (u, v) in arcs.arcs() {
        indeg[v] += 1;
        out_adj[u].push(v);
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(&v) = ready.iter().next() {
        ready.remove(&v);
        order.push(v);
        for &w in &out_adj[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                ready.insert(w);
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }
    // Extract one cycle. Every unprocessed vertex keeps positive residual
    // in-degree, so walking predecessors inside the leftover set must
    // revisit a vertex.
    let in_leftover: BTreeSet<usize> = (0..n).filter(|&v| indeg[v] > 0).collect();
    let mut in_adj = vec![Vec::new(); n];
    for (u, v) in arcs.arcs() {
        if in_leftover.contains(&u) && in_leftover.contains(&v) {
            in_adj[v].push(u);
        }
    }
    let start = *in_leftover.iter().next().unwrap();
    let mut seen = vec![usize::MAX; n];
    let mut path = Vec::new();
    let mut v = start;
    loop {
        seen[v] = path.len();
        path.push(v);
        let pred = in_adj[v]
            .iter()
            .copied()
            .min()
            .expect("leftover vertices keep an unprocessed predecessor");
        if seen[pred] != usize::MAX {
            // path walks arcs backwards; reverse the tail to report the
            // cycle in arc direction.
            let p = seen[pred];
            let mut cycle = vec![path[p]];
            cycle.extend(path[p + 1..].iter().rev());
            return Err(cycle);
        }
        v = pred;
    }
}

/// Tag distinguishing underlying arcs from married co-parent pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeTag {
    Direct,
    Moral,
}

/// Undirected simple graph over vertices `0..n`. Edges stored as ordered
/// pairs `(u, v)` with `u < v`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            edges: BTreeSet::new(),
        }
    }

    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut g = Graph::empty(n);
        for (u, v) in edges {
            g.insert(u, v)?;
        }
        Ok(g)
    }

    pub fn insert(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        if u >= self.n || v >= self.n {
            return Err(GraphError::ArcOutOfRange(u, v, self.n));
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        self.edges.insert((u.min(v), u.max(v)));
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == v || b == v)
            .count()
    }

    /// Number of connected components.
    pub fn components(&self) -> usize {
        let adj = self.adjacency();
        let mut seen = vec![false; self.n];
        let mut count = 0;
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            count += 1;
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }

    /// Graph with the given vertices (and incident edges) removed. Vertex
    /// ids are preserved; removed vertices become isolated and are excluded
    /// from degree accounting by construction.
    pub fn remove_vertices(&self, removed: &[usize]) -> Graph {
        let gone: BTreeSet<usize> = removed.iter().copied().collect();
        Graph {
            n: self.n,
            edges: self
                .edges
                .iter()
                .copied()
                .filter(|&(u, v)| !gone.contains(&u) && !gone.contains(&v))
                .collect(),
        }
    }

    pub fn max_degree(&self) -> usize {
        let mut deg = vec![0usize; self.n];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg.into_iter().max().unwrap_or(0)
    }
}

/// The moralized graph of a DAG: underlying undirected arcs plus an edge
/// between every pair of distinct co-parents. Direct edges keep their tag
/// even when the pair is also married.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoralGraph {
    graph: Graph,
    tags: std::collections::BTreeMap<(usize, usize), EdgeTag>,
}

impl MoralGraph {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn m(&self) -> usize {
        self.graph.m()
    }

    pub fn tag(&self, u: usize, v: usize) -> Option<EdgeTag> {
        self.tags.get(&(u.min(v), u.max(v))).copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.graph.edges()
    }
}

/// Moralizes a DAG. Errors on cyclic input.
pub fn moralize(arcs: &ArcSet) -> Result<MoralGraph, GraphError> {
    if !is_dag(arcs) {
        return Err(GraphError::NotADag);
    }
    let mut graph = Graph::empty(arcs.n());
    let mut tags = std::collections::BTreeMap::new();
    let parents = arcs.parent_lists();
    for (u, v) in arcs.arcs() {
        let key = (u.min(v), u.max(v));
        graph.insert(u, v)?;
        tags.insert(key, EdgeTag::Direct);
    }
    for pa in &parents {
        for i in 0..pa.len() {
            for j in i + 1..pa.len() {
                let key = (pa[i], pa[j]);
                graph.insert(key.0, key.1)?;
                tags.entry(key).or_insert(EdgeTag::Moral);
            }
        }
    }
    Ok(MoralGraph { graph, tags })
}

/// Searches for a dissociation set of size at most `k`: a vertex set whose
/// removal leaves maximum degree one. Exact bounded search tree: pick the
/// lowest-id vertex `v` of degree >= 2 and its two lowest-id neighbors
/// `u`, `w`; any valid set hits `{u, v, w}`, so branch on deleting each.
pub fn dissociation_set_at_most(g: &Graph, k: usize) -> Option<Vec<usize>> {
    fn recurse(g: &Graph, k: usize, chosen: &mut Vec<usize>) -> Option<Vec<usize>> {
        // Find the lowest-id vertex with degree >= 2 among the survivors.
        let mut deg = vec![0usize; g.n()];
        for (u, v) in g.edges() {
            deg[u] += 1;
            deg[v] += 1;
        }
        let offending = (0..g.n()).find(|&v| deg[v] >= 2);
        let v = match offending {
            None => return Some(chosen.clone()),
            Some(v) => v,
        };
        if k == 0 {
            return None;
        }
        let nb = g.neighbors(v);
        for candidate in [nb[0], v, nb[1]] {
            chosen.push(candidate);
            let next = g.remove_vertices(&[candidate]);
            if let Some(found) = recurse(&next, k - 1, chosen) {
                return Some(found);
            }
            chosen.pop();
        }
        None
    }
    let mut chosen = Vec::new();
    recurse(g, k, &mut chosen).map(|mut s| {
        s.sort_unstable();
        s
    })
}

/// The sparse graph classes the problem variants target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PiClass {
    /// Edgeless graphs.
    Pi0,
    /// Maximum degree one.
    Pi1,
    /// Maximum degree two.
    Pi2,
    /// Every connected component has at most three vertices.
    Pi3Coc,
    /// Forests.
    PiForest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeletionMode {
    Vertex,
    Edge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassSpec {
    pub class: PiClass,
    pub mode: DeletionMode,
    pub budget: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassWitness {
    Vertices(Vec<usize>),
    Edges(Vec<(usize, usize)>),
    None,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassCheck {
    pub holds: bool,
    pub witness: ClassWitness,
}

/// Membership check for `Pi + k` deletions, with a witness when it holds.
///
/// Supported combinations: Pi0 + edge deletions (at most `k` edges),
/// Pi1 + vertex deletions (dissociation set), Pi2 and Pi3Coc at budget 0
/// (direct membership; both are NP-hard to test at positive budgets), and
/// PiForest + edge deletions via the feedback edge number `m - n + c`.
/// Everything else is an explicit unsupported signal, never silently wrong.
pub fn check_class(g: &Graph, spec: &ClassSpec) -> Result<ClassCheck, GraphError> {
    match (spec.class, spec.mode, spec.budget) {
        (PiClass::Pi0, DeletionMode::Edge, k) => {
            let holds = g.m() <= k;
            Ok(ClassCheck {
                holds,
                witness: ClassWitness::Edges(g.edges().collect()),
            })
        }
        (PiClass::Pi1, DeletionMode::Vertex, k) => match dissociation_set_at_most(g, k) {
            Some(s) => Ok(ClassCheck {
                holds: true,
                witness: ClassWitness::Vertices(s),
            }),
            None => Ok(ClassCheck {
                holds: false,
                witness: ClassWitness::None,
            }),
        },
        (PiClass::Pi2, _, 0) => Ok(ClassCheck {
            holds: g.max_degree() <= 2,
            witness: ClassWitness::None,
        }),
        (PiClass::Pi3Coc, _, 0) => {
            let holds = component_sizes(g).into_iter().all(|s| s <= 3);
            Ok(ClassCheck {
                holds,
                witness: ClassWitness::None,
            })
        }
        (PiClass::PiForest, DeletionMode::Edge, k) => {
            let fen = g.m() + g.components() - g.n();
            let holds = fen <= k;
            let witness = if holds {
                ClassWitness::Edges(spanning_forest_complement(g))
            } else {
                ClassWitness::None
            };
            Ok(ClassCheck { holds, witness })
        }
        (class, mode, budget) => Err(GraphError::Unsupported(format!(
            "{class:?} with {mode:?} deletions and budget {budget}"
        ))),
    }
}

fn component_sizes(g: &Graph) -> Vec<usize> {
    let adj = g.adjacency();
    let mut seen = vec![false; g.n()];
    let mut sizes = Vec::new();
    for start in 0..g.n() {
        if seen[start] {
            continue;
        }
        let mut size = 0;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            size += 1;
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        sizes.push(size);
    }
    sizes
}

/// Non-tree edges of a deterministic spanning forest (edges scanned in
/// sorted order through a union-find). Exactly `m - n + c` edges.
fn spanning_forest_complement(g: &Graph) -> Vec<(usize, usize)> {
    let mut parent: Vec<usize> = (0..g.n()).collect();
    fn find(parent: &mut Vec<usize>, v: usize) -> usize {
        if parent[v] != v {
            let root = find(parent, parent[v]);
            parent[v] = root;
        }
        parent[v]
    }
    let mut extra = Vec::new();
    for (u, v) in g.edges() {
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru == rv {
            extra.push((u, v));
        } else {
            parent[ru] = rv;
        }
    }
    extra
}
