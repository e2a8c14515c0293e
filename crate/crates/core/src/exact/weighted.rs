use std::collections::VecDeque;
use std::time::Instant;

use super::{
    cap_of, dist_prod_upd, elapsed_ms, finish, iteration_count, iteration_seed, ApspResult, Algorithm,
    IterationStats, IterationView, Observer, SolverConfig, SolverState,
};
use crate::bridging::{hitting_set, BridgingSet};
use crate::dist_prod::Kernel;
use crate::error::Result;
use crate::matrix::{Selector, SuccessorMatrix, WeightMatrix};
use crate::paths::wit_to_suc;
use crate::weight::Weight;

/// Deterministic solver for integer weights. Each iteration rebuilds
/// successors from the witnesses, relaxes along them, and derives the next
/// bridging set from successor walks; then two capped rectangular products
/// through the set extend the settled edge count from `s / 2` to `s`.
pub fn short_path(d: &WeightMatrix, cfg: &SolverConfig) -> Result<ApspResult> {
    super::solve(Algorithm::Det, d, cfg)
}

fn plus(x: Weight, y: Weight) -> Option<Weight> {
    if x.is_inf() || y.is_inf() {
        return None;
    }
    x.checked_add(y).ok()
}

/// Sets `f(u, j) <- d(u, p) + f(p, j)` down every successor tree, root first.
fn tighten(state: &mut SolverState, succ: &SuccessorMatrix, d: &WeightMatrix) -> usize {
    let n = state.n();
    let mut relaxed = 0;
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut queue = VecDeque::new();
    for j in 0..n {
        children.iter_mut().for_each(Vec::clear);
        for u in (0..n).filter(|&u| u != j) {
            if let Some(p) = succ.get(u, j) {
                children[p].push(u);
            }
        }
        queue.clear();
        queue.push_back(j);
        while let Some(p) = queue.pop_front() {
            for idx in 0..children[p].len() {
                let u = children[p][idx];
                queue.push_back(u);
                if p == j {
                    continue;
                }
                if let Some(v) = plus(*d.get(u, p), *state.distances().get(p, j)) {
                    let stamp = state.tick();
                    if state.relax(u, j, v, Some(p), stamp) {
                        relaxed += 1;
                    }
                }
            }
        }
    }
    relaxed
}

/// Walks the first `half - 1` intermediate vertices of every successor path,
/// relaxing prefix distances on the way, and hits every walk set with at
/// least `half` vertices.
fn walk_bridge(state: &mut SolverState, succ: &SuccessorMatrix, d: &WeightMatrix, half: usize) -> (BridgingSet, usize) {
    let n = state.n();
    let budget = half.saturating_sub(1);
    let mut relaxed = 0;
    let mut mark = vec![usize::MAX; n];
    let mut collection = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let tag = i * n + j;
            let mut walk = Vec::new();
            if i != j {
                mark[i] = tag;
                let mut prev = i;
                let mut next = succ.get(i, j);
                while let Some(u) = next {
                    if u == j || walk.len() >= budget || mark[u] == tag {
                        break;
                    }
                    mark[u] = tag;
                    walk.push(u);
                    if prev != i {
                        if let Some(v) = plus(*state.distances().get(i, prev), *d.get(prev, u)) {
                            let stamp = state.tick();
                            if state.relax(i, u, v, Some(prev), stamp) {
                                relaxed += 1;
                            }
                        }
                    }
                    prev = u;
                    next = succ.get(u, j);
                }
            }
            walk.push(i);
            walk.push(j);
            walk.sort_unstable();
            walk.dedup();
            if walk.len() >= half {
                collection.push(walk);
            }
        }
    }
    let mut b = hitting_set(&collection, n).expect("walk sets are nonempty and in range");
    b.s = half as f64;
    (b, relaxed)
}

pub(super) fn run(d: &WeightMatrix, cfg: &SolverConfig, observer: Observer<'_>) -> Result<ApspResult> {
    let start = Instant::now();
    let mut state = SolverState::new(d)?;
    let n = state.n();
    let m = d.max_abs_finite();
    let all = Selector::all(n);
    let mut stats = Vec::new();
    let mut bridge: Option<BridgingSet> = None;

    for l in 1..=iteration_count(n, 2.0) {
        let t0 = Instant::now();
        let s: u64 = 1 << l;
        let rebuilt = cfg.rebuilds_bridge(n, s as f64) || bridge.is_none();
        let mut relaxations = 0;
        if rebuilt {
            let succ = wit_to_suc(state.witnesses(), state.stamps(), d);
            relaxations += tighten(&mut state, &succ, d);
            let (b, r) = walk_bridge(&mut state, &succ, d, (s / 2) as usize);
            relaxations += r;
            bridge = Some(b);
        }
        let b = bridge.as_ref().expect("set above");
        let kernel = (!rebuilt).then_some(Kernel::Naive);
        let opts = cfg.prod_options(iteration_seed(cfg.seed, l as u64), kernel);
        let mut products = Vec::new();
        if !b.is_empty() {
            let sel = b.selector();
            let stamp = state.tick();
            products.push(dist_prod_upd(&mut state, &sel, &all, &all, cap_of(s, m), stamp, &opts)?);
            let stamp = state.tick();
            products.push(dist_prod_upd(&mut state, &all, &sel, &all, cap_of(2 * s, m), stamp, &opts)?);
        }
        stats.push(IterationStats {
            iteration: l,
            s: s as f64,
            bridge_size: b.len(),
            rebuilt_bridge: rebuilt,
            products,
            relaxations,
            elapsed_ms: elapsed_ms(t0),
        });
        observer(&IterationView { iteration: l, settled_edges: s, state: &state });
    }
    finish(state, d, Algorithm::Det, stats, start)
}
