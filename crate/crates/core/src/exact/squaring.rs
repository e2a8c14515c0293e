use std::time::Instant;

use super::{
    dist_prod_upd, elapsed_ms, finish, iteration_count, iteration_seed, ApspResult, Algorithm, IterationStats,
    IterationView, Observer, SolverConfig, SolverState,
};
use crate::dist_prod::{Kernel, UNCAPPED};
use crate::error::Result;
use crate::matrix::{Selector, WeightMatrix};

/// Baseline: `ceil(log2 n)` uncapped squarings of the distance matrix.
pub fn squaring_short_path(d: &WeightMatrix, cfg: &SolverConfig) -> Result<ApspResult> {
    super::solve(Algorithm::Naive, d, cfg)
}

pub(super) fn run(d: &WeightMatrix, cfg: &SolverConfig, observer: Observer<'_>) -> Result<ApspResult> {
    let start = Instant::now();
    let mut state = SolverState::new(d)?;
    let n = state.n();
    let all = Selector::all(n);
    let mut stats = Vec::new();
    for l in 1..=iteration_count(n, 2.0) {
        let t0 = Instant::now();
        let opts = cfg.prod_options(iteration_seed(cfg.seed, l as u64), Some(Kernel::Naive));
        let p = dist_prod_upd(&mut state, &all, &all, &all, UNCAPPED, l as u64, &opts)?;
        let s = (1u64 << l.min(63)) as f64;
        stats.push(IterationStats {
            iteration: l,
            s,
            bridge_size: n,
            rebuilt_bridge: false,
            products: vec![p],
            relaxations: 0,
            elapsed_ms: elapsed_ms(t0),
        });
        observer(&IterationView { iteration: l, settled_edges: 1u64 << l.min(63), state: &state });
    }
    finish(state, d, Algorithm::Naive, stats, start)
}
