//! Acceptance suite: one test per criterion, each printing a PASS line.
//! Everything is oracle- or property-based at desk scale; every tolerance
//! is pinned here.

mod common;

use bnsl::arc_bounded::{solve_ba_color_coding, solve_ba_topological, solve_pi0e};
use bnsl::dissociation::{compose, decompose, solve_completion, solve_pi1v};
use bnsl::generators::*;
use bnsl::graphs::{
    dissociation_set_at_most, moralize, ClassSpec, DeletionMode, Graph, PiClass,
};
use bnsl::matching::{brute_force_matching, max_weight_matching, WeightedGraph};
use bnsl::oracle::{oracle_solve, Constraint};
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pi1(budget: usize) -> Constraint {
    Constraint::MoralClass(ClassSpec {
        class: PiClass::Pi1,
        mode: DeletionMode::Vertex,
        budget,
    })
}

#[test]
fn c01_pi1v_matches_oracle_on_200_instances() {
    let started = std::time::Instant::now();
    for seed in 0..200u64 {
        let n = 3 + (seed % 4) as usize; // 3..=6
        let max_parents = 2.min(n - 1);
        // Distinct sets available with at most two parents over n-1 others.
        let available = (n - 1) + (n - 1) * (n - 2) / 2;
        let entries = (2 + (seed % 6) as usize).min(available); // delta <= 8
        let k = (seed % 3) as usize; // 0..=2
        let inst = random_instance(n, max_parents, entries, 1..=20, seed)
            .unwrap()
            .with_bounds(1, k);
        let fast = solve_pi1v(&inst);
        let slow = oracle_solve(&inst, &pi1(k)).unwrap();
        assert_eq!(fast.score, slow.score, "criterion 1: seed {seed} n {n} k {k}");
        assert_eq!(fast.answer, slow.answer, "criterion 1: seed {seed}");
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs() < 300,
        "criterion 1: runtime {elapsed:?} exceeds 5 minutes"
    );
    println!("criterion 01 oracle equivalence, Pi1+v (200 instances, exact): PASS");
}

#[test]
fn c02_topological_dp_matches_oracle_on_200_instances() {
    for seed in 0..200u64 {
        let n = 3 + (seed % 4) as usize; // 3..=6
        let k = (seed % 5) as usize; // 0..=4
        let inst = random_dag_superstructure_instance(n, 2, 3, seed).with_bounds(1, k);
        let fast = solve_ba_topological(&inst).expect("superstructure is acyclic");
        let slow = oracle_solve(&inst, &Constraint::ArcCount(k)).unwrap();
        assert_eq!(fast.score, slow.score, "criterion 2: seed {seed} n {n} k {k}");
        assert_eq!(fast.answer, slow.answer, "criterion 2: seed {seed}");
    }
    println!("criterion 02 oracle equivalence, arc-bounded DP (200 instances, exact): PASS");
}

#[test]
fn c03_completion_matches_exhaustive_on_100_configurations() {
    for seed in 0..100u64 {
        let cfg = completion_config(seed);
        assert!(cfg.s.len() <= 2 && cfg.q0.len() <= 2 && cfg.r.len() <= 5);
        let done = solve_completion(&cfg.instance, &cfg.s, &cfg.q, &cfg.a_q, 0).unwrap();
        let expected = exhaustive_completion(&cfg);
        assert_eq!(done.score, expected, "criterion 3: seed {seed}");
    }
    println!("criterion 03 completion subroutine vs exhaustive (100 configurations, exact): PASS");
}

#[test]
fn c04_matching_matches_brute_force_on_500_graphs() {
    for seed in 0..500u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2usize..=8);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(0.5) {
                    edges.push((u, v, rng.gen_range(0u64..=25)));
                }
            }
        }
        edges.truncate(24);
        let g = WeightedGraph::new(n, edges).unwrap();
        let fast = max_weight_matching(&g);
        let slow = brute_force_matching(&g).unwrap();
        assert_eq!(fast.total, slow.total, "criterion 4: seed {seed}");
    }
    println!("criterion 04 matching optimality vs brute force (500 graphs, exact): PASS");
}

#[test]
fn c05_decompose_compose_round_trip_on_100_dags() {
    let mut done = 0;
    let mut seed = 0u64;
    while done < 100 {
        seed += 1;
        let n = 4 + (seed % 5) as usize; // 4..=8
        let dag = random_dag(n, 30, seed);
        let moral = moralize(&dag).unwrap();
        let s = (0..=3usize).find_map(|k| dissociation_set_at_most(moral.graph(), k));
        let s = match s {
            Some(s) => s,
            None => continue,
        };
        // Verified dissociation set in hand; split and reassemble.
        let (q, a_q, a_r) = decompose(&dag, &s).unwrap();
        assert!(q.len() <= 2 * s.len(), "criterion 5: seed {seed}");
        let rebuilt = compose(&s, &q, &a_q, &a_r).unwrap();
        assert_eq!(rebuilt, dag, "criterion 5: seed {seed}");
        done += 1;
    }
    println!("criterion 05 decompose/compose round trip and |Q| <= 2|S| (100 DAGs, zero violations): PASS");
}

#[test]
fn c06_reduction_fidelity() {
    let complete = |n: usize| {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.insert(u, v).unwrap();
            }
        }
        g
    };
    let path = |n: usize| Graph::from_edges(n, (0..n - 1).map(|i| (i, i + 1))).unwrap();

    // Clique reduction on K4 (ell = 3): yes at t = 3, k = 3, decided by the
    // dissociation solver.
    let inst = from_clique(&complete(4), 3).unwrap();
    assert_eq!((inst.t(), inst.k()), (3, 3));
    let res = solve_pi1v(&inst);
    assert!(res.answer, "criterion 6: clique K4");

    // C5 is triangle-free: no.
    let c5 = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
    let inst = from_clique(&c5, 3).unwrap();
    assert!(!solve_pi1v(&inst).answer, "criterion 6: clique C5");

    // Hamiltonian path: P5 yes at t = 4, the star K1,3 no.
    let inst = from_hampath(&path(5)).unwrap();
    assert_eq!(inst.t(), 4);
    assert!(
        oracle_solve(&inst, &Constraint::MoralClass(ClassSpec {
            class: PiClass::Pi2,
            mode: DeletionMode::Vertex,
            budget: 0,
        }))
        .unwrap()
        .answer,
        "criterion 6: hampath P5"
    );
    let star = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
    let inst = from_hampath(&star).unwrap();
    assert!(
        !oracle_solve(&inst, &Constraint::MoralClass(ClassSpec {
            class: PiClass::Pi2,
            mode: DeletionMode::Vertex,
            budget: 0,
        }))
        .unwrap()
        .answer,
        "criterion 6: hampath K1,3"
    );

    // Triangle cover: K3 + K3 yes at t = 14, P3 no.
    let mut two_triangles = Graph::empty(6);
    for (u, v) in [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)] {
        two_triangles.insert(u, v).unwrap();
    }
    let inst = from_triangle_cover(&two_triangles).unwrap();
    assert_eq!(inst.t(), 14);
    let coc = Constraint::MoralClass(ClassSpec {
        class: PiClass::Pi3Coc,
        mode: DeletionMode::Vertex,
        budget: 0,
    });
    assert!(
        oracle_solve(&inst, &coc).unwrap().answer,
        "criterion 6: tricover K3+K3"
    );
    let inst = from_triangle_cover(&path(3)).unwrap();
    assert!(!oracle_solve(&inst, &coc).unwrap().answer, "criterion 6: tricover P3");

    // Multicolored clique on the colored triangle: yes at t = 3, k = 15,
    // and the witness moralizes to exactly 15 edges.
    let cg = ColoredGraph::new(complete(3), &[0, 1, 2], 3).unwrap();
    let inst = from_multicolored_clique(&cg).unwrap();
    assert_eq!((inst.t(), inst.k()), (3, 15));
    let res = solve_pi0e(&inst);
    assert!(res.answer, "criterion 6: mcc triangle");
    let moral = moralize(&res.arcs).unwrap();
    assert_eq!(moral.m(), 15, "criterion 6: mcc moral edge count");

    // Multicolored independent set on an edgeless 3-class graph: yes at
    // t = 3.
    let cg = ColoredGraph::new(Graph::empty(6), &[0, 0, 1, 1, 2, 2], 3).unwrap();
    let inst = from_multicolored_independent_set(&cg).unwrap();
    assert_eq!(inst.t(), 3);
    assert!(
        oracle_solve(&inst, &Constraint::ArcCount(inst.k())).unwrap().answer,
        "criterion 6: mis edgeless"
    );

    println!("criterion 06 reduction fidelity (all named cases, zero mismatches): PASS");
}

#[test]
fn c07_color_coding_success_probability_and_soundness() {
    // 20 oracle-verified yes-instances with k in {1,2,3}; 50 independent
    // trials each at the default repetition count. Success rate per
    // instance must reach 0.55 (one-sided slack under 1 - 1/e for sampling
    // noise).
    let mut made = 0usize;
    let mut seed = 0u64;
    while made < 20 {
        seed += 1;
        let k = 1 + (made % 3);
        let n = 3 + k; // 4..=6
        let base = random_instance(n, 2, 4, 1..=15, seed).unwrap();
        let opt = oracle_solve(&base, &Constraint::ArcCount(k)).unwrap().score;
        if opt == 0 {
            continue;
        }
        let yes = base.with_bounds(opt, k);
        made += 1;
        let mut successes = 0usize;
        for trial in 0..50u64 {
            let res = solve_ba_color_coding(&yes, 10_000 + seed * 100 + trial, None).unwrap();
            assert!(res.score <= opt, "criterion 7: witness exceeds optimum");
            if res.answer {
                successes += 1;
            }
        }
        let rate = successes as f64 / 50.0;
        assert!(
            rate >= 0.55,
            "criterion 7: instance {made} (k = {k}) succeeded in {successes}/50 trials"
        );
    }

    // One-sided soundness: zero yes answers across 50 no-instances.
    let mut made = 0usize;
    let mut seed = 1_000u64;
    while made < 50 {
        seed += 1;
        let k = 1 + (made % 3);
        let n = 3 + (made % 3);
        let base = random_instance(n, 2, 3, 1..=15, seed).unwrap();
        let opt = oracle_solve(&base, &Constraint::ArcCount(k)).unwrap().score;
        let no = base.with_bounds(opt + 1, k);
        made += 1;
        let res = solve_ba_color_coding(&no, seed, None).unwrap();
        assert!(!res.answer, "criterion 7: false yes on no-instance seed {seed}");
    }
    println!("criterion 07 color-coding success rate >= 0.55 and one-sided soundness: PASS");
}

#[test]
fn c08_normalization_preserves_optima_on_100_instances() {
    for seed in 0..100u64 {
        let n = 3 + (seed % 3) as usize; // 3..=5
        let k = (seed % 3) as usize;
        let base = random_instance_with_empty_scores(n, seed);
        let offset: u64 = (0..n).map(|v| base.table().empty_score(v)).sum();
        let orig = base.with_bounds(offset + 5, k);
        let (norm, reported) = orig.normalize().unwrap();
        assert_eq!(reported, offset, "criterion 8: seed {seed}");
        let a = oracle_solve(&orig, &Constraint::ArcCount(k)).unwrap().score;
        let b = oracle_solve(&norm, &Constraint::ArcCount(k)).unwrap().score;
        assert_eq!(a, b + offset, "criterion 8: seed {seed} n {n} k {k}");
    }
    println!("criterion 08 normalization equivalence under the oracle (100 instances, exact): PASS");
}

#[test]
fn c09_xp_solver_runtime_sanity() {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();

    // n = 12, delta <= 20, k = 2: under 60 seconds single-threaded.
    let inst = random_instance(12, 3, 19, 1..=100, 900)
        .unwrap()
        .with_bounds(1, 2);
    assert!(inst.delta() <= 20);
    let started = std::time::Instant::now();
    let res = pool.install(|| solve_pi1v(&inst));
    let elapsed = started.elapsed();
    assert!(res.score > 0);
    assert!(
        elapsed.as_secs() < 60,
        "criterion 9: n = 12, k = 2 took {elapsed:?}"
    );

    // k = 0 at n = 100: under 5 seconds.
    let inst = random_instance(100, 3, 19, 1..=100, 901)
        .unwrap()
        .with_bounds(1, 0);
    let started = std::time::Instant::now();
    let res = pool.install(|| solve_pi1v(&inst));
    let elapsed = started.elapsed();
    assert!(res.score > 0);
    assert!(
        elapsed.as_millis() < 5_000,
        "criterion 9: n = 100, k = 0 took {elapsed:?}"
    );
    println!("criterion 09 XP solver runtime sanity (k=2/n=12 < 60 s, k=0/n=100 < 5 s): PASS");
}

#[test]
fn c10_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let inst = random_instance(6, 2, 4, 1..=20, 77).unwrap();
    let path = dir.path().join("fixture.scores");
    std::fs::write(&path, bnsl::cli::write_score_file(&inst)).unwrap();
    let p = path.to_str().unwrap();

    let run = |args: &[&str]| -> (i32, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = bnsl::cli::run(args.iter().copied(), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap())
    };

    // Every solver, invoked twice with identical inputs and seeds, and the
    // parallel ones across thread counts.
    let cases: Vec<Vec<&str>> = vec![
        vec!["bnsl", "solve", "--variant", "pi1v", "-t", "5", "-k", "1", "--threads", "1", p],
        vec!["bnsl", "solve", "--variant", "pi1v", "-t", "5", "-k", "1", "--threads", "4", p],
        vec!["bnsl", "solve", "--variant", "ba-cc", "-t", "5", "-k", "2", "--seed", "9", "--threads", "1", p],
        vec!["bnsl", "solve", "--variant", "ba-cc", "-t", "5", "-k", "2", "--seed", "9", "--threads", "4", p],
        vec!["bnsl", "solve", "--variant", "pi0e", "-t", "5", "-k", "3", p],
        vec!["bnsl", "solve", "--variant", "oracle", "--constraint", "arcs", "-t", "5", "-k", "2", p],
    ];
    let mut outputs = Vec::new();
    for args in &cases {
        let (c1, o1) = run(args);
        let (c2, o2) = run(args);
        assert_eq!(c1, c2, "criterion 10: exit codes differ for {args:?}");
        assert_eq!(o1, o2, "criterion 10: reports differ across reruns for {args:?}");
        outputs.push(o1);
    }
    // Thread counts must not change the report either.
    assert_eq!(outputs[0], outputs[1], "criterion 10: pi1v thread count changed the report");
    assert_eq!(outputs[2], outputs[3], "criterion 10: ba-cc thread count changed the report");

    // ba-dp needs an acyclic superstructure; use a dedicated fixture.
    let dag_inst = random_dag_superstructure_instance(6, 2, 3, 5).with_bounds(5, 3);
    let dag_path = dir.path().join("dag.scores");
    std::fs::write(&dag_path, bnsl::cli::write_score_file(&dag_inst)).unwrap();
    let dp = dag_path.to_str().unwrap();
    let args = vec!["bnsl", "solve", "--variant", "ba-dp", "-t", "5", "-k", "3", dp];
    let (c1, o1) = run(&args);
    let (c2, o2) = run(&args);
    assert_eq!(c1, c2);
    assert_eq!(o1, o2, "criterion 10: ba-dp reports differ");

    println!("criterion 10 determinism (byte-identical reports, any thread count): PASS");
}
