mod common;

use bridging_apsp::exact::{solve, Algorithm, SolverConfig};
use bridging_apsp::generate::{random_graph, GenParams};
use bridging_apsp::graph::Graph;
use bridging_apsp::matrix::{IndexMatrix, Matrix};
use bridging_apsp::paths::{reconstruct_path, reconstruct_path_with_stamps, trace_simple_path, trace_simple_path_counted, wit_to_suc};
use bridging_apsp::{ApspError, Weight};

#[test]
fn zero_weight_cycles_still_trace_simple_paths() {
    for seed in 0..40u64 {
        let n = 3 + seed as usize % 25;
        // weights in [-1, 1] make zero-weight cycles common
        let g = random_graph(&GenParams::new(n, 0.35, -1, 1, seed)).unwrap();
        let d = g.to_weight_matrix();
        let want = common::truth(&g);
        for alg in [Algorithm::Det, Algorithm::Rand, Algorithm::Naive] {
            let r = solve(alg, &d, &SolverConfig::with_seed(seed)).unwrap();
            let bad = common::audit(&r, &d, &want);
            assert!(bad.is_empty(), "{alg} seed={seed}: {:?}", &bad[..bad.len().min(5)]);
        }
    }
}

#[test]
fn successor_traces_cost_one_step_per_edge() {
    let g = random_graph(&GenParams::new(30, 0.1, 0, 5, 3)).unwrap();
    let d = g.to_weight_matrix();
    let r = solve(Algorithm::Det, &d, &SolverConfig::default()).unwrap();
    let s = r.successors(&d);
    for i in 0..30 {
        for j in 0..30 {
            if let Ok((p, ops)) = trace_simple_path_counted(&s, &d, i, j) {
                assert_eq!(ops, p.edge_count());
            }
        }
    }
}

#[test]
fn chain_path_is_recovered_both_ways() {
    let g = Graph::from_one_based(5, &[(1, 2, 2), (2, 3, 1), (3, 4, 3), (4, 5, 1), (1, 5, 10)]).unwrap();
    let d = g.to_weight_matrix();
    let r = solve(Algorithm::Det, &d, &SolverConfig::default()).unwrap();
    let p = trace_simple_path(&r.successors(&d), &d, 0, 4).unwrap();
    assert_eq!(p.vertices, vec![0, 1, 2, 3, 4]);
    assert_eq!(p.weight, Weight::of(7));
    let q = reconstruct_path_with_stamps(&r.witnesses, &d, &r.stamps, 0, 4).unwrap();
    assert_eq!(q.vertices, p.vertices);
    assert!(matches!(trace_simple_path(&r.successors(&d), &d, 4, 0), Err(ApspError::NoPath { .. })));
}

#[test]
fn malformed_inputs_are_rejected() {
    let d = Matrix::filled(3, 3, Weight::of(1));
    let mut w = IndexMatrix::empty(3, 3);
    w.set(0, 2, Some(1));
    w.set(0, 1, Some(2));
    w.set(1, 2, Some(0));
    assert!(matches!(reconstruct_path(&w, &d, 0, 2), Err(ApspError::MalformedWitness(_))));

    let mut s = IndexMatrix::empty(3, 3);
    s.set(0, 2, Some(1));
    s.set(1, 2, Some(0));
    assert!(matches!(trace_simple_path(&s, &d, 0, 2), Err(ApspError::MalformedSuccessor(_))));

    // stamps that do not descend are refused even when the witnesses work
    let mut w = IndexMatrix::empty(3, 3);
    w.set(0, 2, Some(1));
    let t = Matrix::from_vec(3, 3, vec![0, 5, 5, 0, 0, 0, 0, 0, 0]);
    assert!(reconstruct_path(&w, &d, 0, 2).is_ok());
    assert!(reconstruct_path_with_stamps(&w, &d, &t, 0, 2).is_err());
    let succ = wit_to_suc(&w, &t, &d);
    assert_eq!(succ.get(0, 0), Some(0));
}
