use std::time::Instant;

use super::{
    cap_of, dist_prod_upd, elapsed_ms, finish, iteration_count, iteration_seed, ApspResult, Algorithm,
    IterationStats, IterationView, Observer, SolverConfig, SolverState,
};
use crate::bridging::rand_bridging_set;
use crate::error::Result;
use crate::matrix::{Selector, WeightMatrix};

/// Randomized solver: `ceil(log_1.5 n)` products through random bridging sets.
/// Correct with high probability; the result reports whether it was certified.
pub fn rand_short_path(d: &WeightMatrix, cfg: &SolverConfig) -> Result<ApspResult> {
    super::solve(Algorithm::Rand, d, cfg)
}

pub(super) fn run(d: &WeightMatrix, cfg: &SolverConfig, observer: Observer<'_>) -> Result<ApspResult> {
    let start = Instant::now();
    let mut state = SolverState::new(d)?;
    let n = state.n();
    let m = d.max_abs_finite();
    let all = Selector::all(n);
    let mut stats = Vec::new();

    // integer edge-count bound s_l = ceil(3 s_{l-1} / 2), which also sizes the caps
    let mut settled: u64 = 1;
    let mut s_real = 1.0f64;
    for l in 1..=iteration_count(n, 1.5) {
        let t0 = Instant::now();
        settled = (3 * settled).div_ceil(2);
        s_real *= 1.5;
        let seed = iteration_seed(cfg.seed, l as u64);
        let bridge = rand_bridging_set(n, s_real, seed)?;
        let mut products = Vec::new();
        if !bridge.is_empty() {
            let opts = cfg.prod_options(seed, None);
            let cap = cap_of(settled, m);
            products.push(dist_prod_upd(&mut state, &all, &bridge.selector(), &all, cap, l as u64, &opts)?);
        }
        stats.push(IterationStats {
            iteration: l,
            s: s_real,
            bridge_size: bridge.len(),
            rebuilt_bridge: true,
            products,
            relaxations: 0,
            elapsed_ms: elapsed_ms(t0),
        });
        observer(&IterationView { iteration: l, settled_edges: settled, state: &state });
    }
    finish(state, d, Algorithm::Rand, stats, start)
}
