use std::collections::VecDeque;

use rayon::prelude::*;

use super::ApspResult;
use crate::dist_prod::{product_only, Kernel, UNCAPPED};
use crate::graph::Graph;
use crate::matrix::WeightMatrix;
use crate::weight::Weight;

/// Vertices whose diagonal entry is negative, or `None`.
pub fn detect_negative_cycle(r: &ApspResult) -> Option<Vec<usize>> {
    let f = &r.distances;
    let v: Vec<usize> = (0..f.rows()).filter(|&i| *f.get(i, i) < Weight::ZERO).collect();
    (!v.is_empty()).then_some(v)
}

/// Sets `f(i, j) = -inf` whenever `i` reaches a flagged vertex that reaches `j`.
pub fn propagate_neg_infinity(mut r: ApspResult, g: &Graph) -> ApspResult {
    let flagged = r.negative_cycle.clone().or_else(|| detect_negative_cycle(&r)).unwrap_or_default();
    propagate(&mut r, &g.to_weight_matrix(), &flagged);
    r.negative_cycle = detect_negative_cycle(&r);
    r
}

fn adjacency(d: &WeightMatrix) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let n = d.rows();
    let mut fwd = vec![Vec::new(); n];
    let mut bwd = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if i != j && d.get(i, j).is_finite() {
                fwd[i].push(j);
                bwd[j].push(i);
            }
        }
    }
    (fwd, bwd)
}

fn reach(adj: &[Vec<usize>], from: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen
}

fn propagate(r: &mut ApspResult, d: &WeightMatrix, flagged: &[usize]) {
    if flagged.is_empty() {
        return;
    }
    let n = d.rows();
    let (fwd, bwd) = adjacency(d);
    let mut done = vec![false; n];
    for &v in flagged {
        if done[v] {
            continue;
        }
        let out = reach(&fwd, v);
        let inc = reach(&bwd, v);
        for u in 0..n {
            // flagged vertices in the same component share both reach sets
            if out[u] && inc[u] {
                done[u] = true;
            }
        }
        for i in (0..n).filter(|&i| inc[i]) {
            for j in (0..n).filter(|&j| out[j]) {
                r.distances.set(i, j, Weight::NEG_INF);
                r.witnesses.set(i, j, None);
            }
        }
    }
}

/// Is `f(i, j) <= f(i, k) + d(k, j)` for every finite `f(i, k)` and arc `(k, j)`?
fn closed_under_arcs(f: &WeightMatrix, d: &WeightMatrix) -> bool {
    let n = f.rows();
    let arcs: Vec<Vec<(usize, i128)>> = (0..n)
        .map(|k| (0..n).filter_map(|j| d.get(k, j).value().map(|w| (j, w as i128))).collect())
        .collect();
    (0..n).into_par_iter().all(|i| {
        let row = f.row(i);
        (0..n).all(|k| {
            let Some(fik) = row[k].value() else { return true };
            arcs[k].iter().all(|&(j, w)| match row[j].value() {
                Some(fij) => fij as i128 <= fik as i128 + w,
                None => row[j].is_neg_inf(),
            })
        })
    })
}

/// Every vertex on a negative cycle of at most `n` arcs, by repeated
/// squaring of an independent copy of the arc matrix.
fn search_negative_cycles(d: &WeightMatrix) -> Vec<usize> {
    let n = d.rows();
    let mut g = d.clone();
    for i in 0..n {
        g.set(i, i, (*d.get(i, i)).min(Weight::ZERO));
    }
    let rounds = super::iteration_count(n, 2.0) + 1;
    for _ in 0..rounds {
        let Ok(sq) = product_only(&g, &g, UNCAPPED, Kernel::Naive) else { break };
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if *sq.get(i, j) < *g.get(i, j) {
                    g.set(i, j, *sq.get(i, j));
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    (0..n).filter(|&i| *g.get(i, i) < Weight::ZERO).collect()
}

/// Certifies the result, or finds and propagates negative cycles.
pub(super) fn settle(r: &mut ApspResult, d: &WeightMatrix) {
    let mut flagged = detect_negative_cycle(r).unwrap_or_default();
    if flagged.is_empty() && closed_under_arcs(&r.distances, d) {
        r.diagnostics.certified = true;
        return;
    }
    flagged.extend(search_negative_cycles(d));
    flagged.sort_unstable();
    flagged.dedup();
    propagate(r, d, &flagged);
    r.negative_cycle = detect_negative_cycle(r);
}
