//! Reference shortest-path computations for checking the fast solvers.
//!
//! Everything here is deliberately plain: wide integers, textbook loops, and
//! no code shared with the product kernels.

use std::collections::VecDeque;

use crate::error::{ApspError, Result};
use crate::graph::Graph;
use crate::matrix::{Matrix, WeightMatrix};
use crate::weight::Weight;

/// Values below this are clamped while a negative cycle keeps pulling them down.
const CLAMP: i128 = -(1i128 << 100);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub distances: WeightMatrix,
    /// Minimum edge count over shortest paths; `None` where the distance is infinite.
    pub eta: Matrix<Option<u32>>,
    pub has_negative_cycle: bool,
}

fn to_weight(v: Option<i128>) -> Result<Weight> {
    match v {
        None => Ok(Weight::INF),
        Some(x) => i64::try_from(x)
            .ok()
            .and_then(Weight::finite)
            .ok_or_else(|| ApspError::Overflow(format!("oracle distance {x}"))),
    }
}

/// Floyd-Warshall over `i128`. Pairs routed through a negative cycle get `-inf`.
pub fn floyd_warshall(d: &WeightMatrix) -> Result<OracleResult> {
    if !d.is_square() {
        return Err(ApspError::DimensionMismatch("oracle input must be square".into()));
    }
    let n = d.rows();
    let mut dist: Vec<Vec<Option<i128>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let w = *d.get(i, j);
                    let v = w.value().map(i128::from);
                    if i == j {
                        Some(v.unwrap_or(0).min(0))
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    for k in 0..n {
        for i in 0..n {
            let Some(ik) = dist[i][k] else { continue };
            for j in 0..n {
                if let Some(kj) = dist[k][j] {
                    let cand = (ik + kj).max(CLAMP);
                    if dist[i][j].is_none_or(|cur| cand < cur) {
                        dist[i][j] = Some(cand);
                    }
                }
            }
        }
    }
    let on_cycle: Vec<bool> = (0..n).map(|v| dist[v][v].is_some_and(|x| x < 0)).collect();
    let has_negative_cycle = on_cycle.iter().any(|&b| b);

    let mut out = Matrix::filled(n, n, Weight::INF);
    for i in 0..n {
        for j in 0..n {
            let through_cycle =
                (0..n).any(|v| on_cycle[v] && dist[i][v].is_some() && dist[v][j].is_some());
            let w = if through_cycle { Weight::NEG_INF } else { to_weight(dist[i][j])? };
            out.set(i, j, w);
        }
    }
    let eta = min_edge_counts(d, &out);
    Ok(OracleResult { distances: out, eta, has_negative_cycle })
}

/// Bellman-Ford from every source over the arc list. Vertices still
/// relaxable after `n - 1` rounds, and everything they reach, get `-inf`.
pub fn bellman_ford_all(g: &Graph) -> Result<OracleResult> {
    let n = g.n();
    let mut out = Matrix::filled(n, n, Weight::INF);
    let mut any_cycle = false;
    for src in 0..n {
        let mut dist: Vec<Option<i128>> = vec![None; n];
        dist[src] = Some(0);
        for _ in 0..n.saturating_sub(1) {
            let mut changed = false;
            for e in g.edges() {
                if let Some(du) = dist[e.from] {
                    let cand = (du + e.weight as i128).max(CLAMP);
                    if dist[e.to].is_none_or(|dv| cand < dv) {
                        dist[e.to] = Some(cand);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut neg = vec![false; n];
        let mut queue = VecDeque::new();
        for e in g.edges() {
            if let (Some(du), Some(dv)) = (dist[e.from], dist[e.to]) {
                if du + (e.weight as i128) < dv && !neg[e.to] {
                    neg[e.to] = true;
                    queue.push_back(e.to);
                }
            }
        }
        // a negative self-loop at the source is invisible to the loop above
        for e in g.edges() {
            if e.from == e.to && e.weight < 0 && dist[e.from].is_some() && !neg[e.from] {
                neg[e.from] = true;
                queue.push_back(e.from);
            }
        }
        while let Some(u) = queue.pop_front() {
            for e in g.edges().iter().filter(|e| e.from == u) {
                if !neg[e.to] {
                    neg[e.to] = true;
                    queue.push_back(e.to);
                }
            }
        }
        for v in 0..n {
            if neg[v] {
                any_cycle = true;
                out.set(src, v, Weight::NEG_INF);
            } else {
                out.set(src, v, to_weight(dist[v])?);
            }
        }
    }
    let d = g.to_weight_matrix();
    let eta = min_edge_counts(&d, &out);
    Ok(OracleResult { distances: out, eta, has_negative_cycle: any_cycle })
}

/// Breadth-first search from every vertex, ignoring weights.
pub fn bfs_all(g: &Graph) -> WeightMatrix {
    let n = g.n();
    let mut adj = vec![Vec::new(); n];
    for e in g.edges() {
        adj[e.from].push(e.to);
    }
    let mut out = Matrix::filled(n, n, Weight::INF);
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        dist[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    q.push_back(v);
                }
            }
        }
        for v in 0..n {
            if dist[v] != usize::MAX {
                out.set(s, v, Weight::of(dist[v] as i64));
            }
        }
    }
    out
}

/// Minimum number of edges among minimum-weight paths, by breadth-first
/// layers over the arcs that are tight for the given exact distances.
/// Undefined (and `None`) wherever the distance is not finite.
pub fn min_edge_counts(d: &WeightMatrix, delta: &WeightMatrix) -> Matrix<Option<u32>> {
    let n = d.rows();
    let mut eta = Matrix::filled(n, n, None);
    for i in 0..n {
        if !delta.get(i, i).is_finite() {
            continue;
        }
        let mut level = vec![None; n];
        level[i] = Some(0u32);
        let mut frontier = vec![i];
        let mut depth = 0;
        while !frontier.is_empty() {
            depth += 1;
            let mut next = Vec::new();
            for &u in &frontier {
                let du = delta.get(i, u).value().expect("frontier is finite") as i128;
                for v in 0..n {
                    if v == u || level[v].is_some() {
                        continue;
                    }
                    let (Some(w), Some(dv)) = (d.get(u, v).value(), delta.get(i, v).value()) else {
                        continue;
                    };
                    if du + w as i128 == dv as i128 {
                        level[v] = Some(depth);
                        next.push(v);
                    }
                }
            }
            frontier = next;
        }
        for v in 0..n {
            eta.set(i, v, level[v]);
        }
    }
    eta
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BridgingReport {
    /// Pairs that needed a bridge.
    pub checked: usize,
    /// 0-based pairs with no suitable bridge vertex.
    pub violations: Vec<(usize, usize)>,
}

impl BridgingReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn check_with(
    bridge: &[usize],
    oracle: &OracleResult,
    s: u32,
    accept: impl Fn(usize, usize, usize) -> bool,
) -> BridgingReport {
    let n = oracle.distances.rows();
    let mut report = BridgingReport::default();
    for i in 0..n {
        for j in 0..n {
            let Some(e) = *oracle.eta.get(i, j) else { continue };
            if e < s {
                continue;
            }
            report.checked += 1;
            if !bridge.iter().any(|&k| accept(i, j, k)) {
                report.violations.push((i, j));
            }
        }
    }
    report
}

fn splits(oracle: &OracleResult, i: usize, j: usize, k: usize) -> bool {
    let dist = &oracle.distances;
    match (dist.get(i, k).value(), dist.get(k, j).value(), dist.get(i, j).value()) {
        (Some(a), Some(b), Some(c)) => a as i128 + b as i128 == c as i128,
        _ => false,
    }
}

/// Every pair with `eta >= s` has a bridge vertex on some shortest path.
pub fn check_bridging(bridge: &[usize], oracle: &OracleResult, s: u32) -> BridgingReport {
    check_with(bridge, oracle, s, |i, j, k| splits(oracle, i, j, k))
}

/// As [`check_bridging`], with the edge counts also splitting at the bridge.
pub fn check_strong_bridging(bridge: &[usize], oracle: &OracleResult, s: u32) -> BridgingReport {
    check_with(bridge, oracle, s, |i, j, k| {
        splits(oracle, i, j, k)
            && match (*oracle.eta.get(i, k), *oracle.eta.get(k, j), *oracle.eta.get(i, j)) {
                (Some(a), Some(b), Some(c)) => a + b == c,
                _ => false,
            }
    })
}

/// As [`check_bridging`], with the bridge also within `s` edges of the source.
pub fn check_close_bridging(bridge: &[usize], oracle: &OracleResult, s: u32) -> BridgingReport {
    check_with(bridge, oracle, s, |i, j, k| {
        splits(oracle, i, j, k) && oracle.eta.get(i, k).is_some_and(|e| e <= s)
    })
}
