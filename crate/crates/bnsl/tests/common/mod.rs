//! Shared helpers for the integration suites: graph-side brute-force
//! checkers for the reduction source problems, plus seeded random objects.

#![allow(dead_code)]

use bnsl::generators::ColoredGraph;
use bnsl::graphs::{ArcSet, Graph};
use bnsl::scores::{Instance, ParentScoreTable, ParentSet, Score};
use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_graph(n: usize, edge_percent: u32, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_ratio(edge_percent, 100) {
                g.insert(u, v).unwrap();
            }
        }
    }
    g
}

pub fn random_dag(n: usize, arc_percent: u32, seed: u64) -> ArcSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        perm.swap(i, j);
    }
    let mut arcs = ArcSet::empty(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_ratio(arc_percent, 100) {
                arcs.insert(perm[i], perm[j]).unwrap();
            }
        }
    }
    arcs
}

/// Random instance whose superstructure is acyclic: parent sets are drawn
/// from vertices later in a hidden permutation.
pub fn random_dag_superstructure_instance(
    n: usize,
    max_parents: usize,
    entries_per_vertex: usize,
    seed: u64,
) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        perm.swap(i, j);
    }
    let rank = {
        let mut r = vec![0usize; n];
        for (i, &v) in perm.iter().enumerate() {
            r[v] = i;
        }
        r
    };
    let mut table = ParentScoreTable::new(n);
    for v in 0..n {
        let pool: Vec<usize> = (0..n).filter(|&u| rank[u] > rank[v]).collect();
        if pool.is_empty() {
            continue;
        }
        let mut sets = std::collections::HashSet::new();
        for _ in 0..entries_per_vertex {
            let size = rng.gen_range(1..=max_parents.min(pool.len()));
            let mut p = pool.clone();
            for i in 0..size {
                let j = rng.gen_range(i..p.len());
                p.swap(i, j);
            }
            let set = ParentSet::new(p[..size].to_vec()).unwrap();
            if sets.insert(set.clone()) {
                table.insert(v, set, rng.gen_range(1..=50)).unwrap();
            }
        }
    }
    Instance::with_default_names(table, 0, 0).unwrap()
}

/// Random instance with positive empty-set scores on every vertex.
pub fn random_instance_with_empty_scores(n: usize, seed: u64) -> Instance {
    let base = bnsl::generators::random_instance(n, 2, 3, 1..=20, seed).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd_ef01);
    let mut table = ParentScoreTable::new(n);
    for v in 0..n {
        table
            .insert(v, ParentSet::empty(), rng.gen_range(1..=10))
            .unwrap();
        for e in base.table().stored(v) {
            table.insert(v, e.set.clone(), e.score).unwrap();
        }
    }
    Instance::with_default_names(table, 0, 0).unwrap()
}

// --- Brute-force checkers for the reduction source problems -------------

pub fn has_clique(g: &Graph, ell: usize) -> bool {
    if ell > g.n() {
        return false;
    }
    (0..g.n()).combinations(ell).any(|c| {
        c.iter()
            .tuple_combinations()
            .all(|(&u, &v)| g.has_edge(u, v))
    })
}

pub fn has_hamiltonian_path(g: &Graph) -> bool {
    let n = g.n();
    if n <= 1 {
        return true;
    }
    (0..n)
        .permutations(n)
        .any(|p| p.windows(2).all(|w| g.has_edge(w[0], w[1])))
}

pub fn has_perfect_triangle_packing(g: &Graph) -> bool {
    fn recurse(g: &Graph, used: &mut Vec<bool>) -> bool {
        let v = match used.iter().position(|&u| !u) {
            None => return true,
            Some(v) => v,
        };
        let nb: Vec<usize> = g.neighbors(v).into_iter().filter(|&u| !used[u]).collect();
        for i in 0..nb.len() {
            for j in i + 1..nb.len() {
                if g.has_edge(nb[i], nb[j]) {
                    used[v] = true;
                    used[nb[i]] = true;
                    used[nb[j]] = true;
                    if recurse(g, used) {
                        return true;
                    }
                    used[v] = false;
                    used[nb[i]] = false;
                    used[nb[j]] = false;
                }
            }
        }
        false
    }
    if !g.n().is_multiple_of(3) {
        return false;
    }
    recurse(g, &mut vec![false; g.n()])
}

fn transversals(cg: &ColoredGraph) -> Vec<Vec<usize>> {
    cg.classes()
        .iter()
        .map(|c| c.iter().copied())
        .multi_cartesian_product()
        .collect()
}

pub fn has_multicolored_clique(cg: &ColoredGraph) -> bool {
    transversals(cg).into_iter().any(|t| {
        t.iter()
            .tuple_combinations()
            .all(|(&u, &v)| cg.graph().has_edge(u, v))
    })
}

pub fn has_multicolored_independent_set(cg: &ColoredGraph) -> bool {
    transversals(cg).into_iter().any(|t| {
        t.iter()
            .tuple_combinations()
            .all(|(&u, &v)| !cg.graph().has_edge(u, v))
    })
}

/// Product of potential-parent-set counts, for skipping instances the
/// oracle guard would reject.
pub fn candidate_product(instance: &Instance) -> u128 {
    (0..instance.n()).fold(1u128, |p, v| {
        p.saturating_mul(instance.table().stored(v).len() as u128 + 1)
    })
}

/// Total score of an arc set under an instance's tables.
pub fn score_of_arcs(instance: &Instance, arcs: &ArcSet) -> Score {
    arcs.parent_lists()
        .into_iter()
        .enumerate()
        .map(|(v, pa)| instance.table().score_of(v, &ParentSet::new(pa).unwrap()))
        .sum()
}

/// A random completion configuration: an instance together with a valid
/// ancestor tuple whose partition has the requested shape. `Q0` vertices
/// get distinct children in `S`; an optional `Q1` pair shares a free child.
pub struct CompletionConfig {
    pub instance: Instance,
    pub s: Vec<usize>,
    pub q: Vec<usize>,
    pub a_q: ArcSet,
    pub r: Vec<usize>,
    pub q0: Vec<usize>,
}

pub fn completion_config(seed: u64) -> CompletionConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s_len = rng.gen_range(1..=2usize);
    let q0_len = rng.gen_range(0..=2usize.min(s_len));
    let with_q1 = q0_len < s_len && rng.gen_bool(0.5);
    let r_len = rng.gen_range(1..=5usize);
    let n = s_len + q0_len + if with_q1 { 2 } else { 0 } + r_len;

    let s: Vec<usize> = (0..s_len).collect();
    let q0: Vec<usize> = (s_len..s_len + q0_len).collect();
    let q1: Vec<usize> = if with_q1 {
        (s_len + q0_len..s_len + q0_len + 2).collect()
    } else {
        Vec::new()
    };
    let r: Vec<usize> = (s_len + q0_len + q1.len()..n).collect();

    let mut a_q = ArcSet::empty(n);
    for (i, &qv) in q0.iter().enumerate() {
        a_q.insert(qv, s[i]).unwrap();
    }
    if with_q1 {
        // The pair shares the first S vertex without a Q0 child.
        a_q.insert(q1[0], s[q0_len]).unwrap();
        a_q.insert(q1[1], s[q0_len]).unwrap();
    }

    let mut table = ParentScoreTable::new(n);
    for &v in &r {
        let others: Vec<usize> = (0..n).filter(|&u| u != v).collect();
        let mut sets = std::collections::HashSet::new();
        for _ in 0..3 {
            let size = rng.gen_range(1..=3.min(others.len()));
            let mut pool = others.clone();
            for i in 0..size {
                let j = rng.gen_range(i..pool.len());
                pool.swap(i, j);
            }
            let set = ParentSet::new(pool[..size].to_vec()).unwrap();
            if sets.insert(set.clone()) {
                table.insert(v, set, rng.gen_range(1..=20)).unwrap();
            }
        }
    }
    let instance = Instance::with_default_names(table, 0, 0).unwrap();
    let mut q = [q0.clone(), q1].concat();
    q.sort_unstable();
    CompletionConfig {
        instance,
        s,
        q,
        a_q,
        r,
        q0,
    }
}

/// Exhaustive maximum of the completion objective over all suitable arc
/// sets: every vertex of `R` tries each potential parent set inside
/// `S ∪ Q0 ∪ R`, and assignments violating the one-incident-arc condition
/// are discarded.
pub fn exhaustive_completion(cfg: &CompletionConfig) -> Score {
    let inst = &cfg.instance;
    let allowed: Vec<usize> = cfg
        .s
        .iter()
        .chain(cfg.q0.iter())
        .chain(cfg.r.iter())
        .copied()
        .collect();
    let cands: Vec<Vec<(ParentSet, Score)>> = cfg
        .r
        .iter()
        .map(|&v| {
            inst.potential_parents(v)
                .unwrap()
                .into_iter()
                .filter(|(set, _)| set.members().iter().all(|u| allowed.contains(u)))
                .collect()
        })
        .collect();
    let in_rq0 = |u: usize| cfg.r.contains(&u) || cfg.q0.contains(&u);

    let mut best = 0;
    let mut idx = vec![0usize; cfg.r.len()];
    loop {
        let mut incident = vec![0usize; inst.n()];
        let mut ok = true;
        let mut score = 0;
        for (pos, &i) in idx.iter().enumerate() {
            let child = cfg.r[pos];
            let (set, sc) = &cands[pos][i];
            score += sc;
            for &u in set.members() {
                if in_rq0(u) {
                    incident[u] += 1;
                    incident[child] += 1;
                }
            }
        }
        for &w in cfg.q0.iter().chain(cfg.r.iter()) {
            if incident[w] > 1 {
                ok = false;
                break;
            }
        }
        if ok && score > best {
            best = score;
        }
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return best;
            }
            idx[pos] += 1;
            if idx[pos] < cands[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}
