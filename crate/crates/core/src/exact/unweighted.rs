use std::time::Instant;

use super::{
    cap_of, dist_prod_upd, elapsed_ms, finish, iteration_count, iteration_seed, ApspResult, Algorithm,
    IterationStats, IterationView, Observer, SolverConfig, SolverState,
};
use crate::bridging::{find_bridge, BridgingSet};
use crate::dist_prod::Kernel;
use crate::error::{ApspError, Result};
use crate::matrix::{Selector, WeightMatrix};

/// Deterministic solver for unit-weight graphs: bridging sets come from the
/// witnesses found so far instead of random sampling.
pub fn unwght_short_path(d: &WeightMatrix, cfg: &SolverConfig) -> Result<ApspResult> {
    super::solve(Algorithm::Unweighted, d, cfg)
}

fn check_unweighted(d: &WeightMatrix) -> Result<()> {
    for i in 0..d.rows() {
        for j in 0..d.cols() {
            let w = *d.get(i, j);
            let ok = match w.value() {
                None => w.is_inf(),
                Some(v) => v == 1 || (i == j && v == 0),
            };
            if !ok {
                return Err(ApspError::Contract(format!(
                    "entry ({}, {}) = {w} is not an unweighted arc",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    Ok(())
}

pub(super) fn run(d: &WeightMatrix, cfg: &SolverConfig, observer: Observer<'_>) -> Result<ApspResult> {
    let start = Instant::now();
    let mut state = SolverState::new(d)?;
    check_unweighted(d)?;
    let n = state.n();
    let m = d.max_abs_finite();
    let all = Selector::all(n);
    let mut stats = Vec::new();
    let mut bridge: Option<BridgingSet> = None;

    let mut s: u64 = 1;
    for l in 1..=iteration_count(n, 1.5) {
        let t0 = Instant::now();
        s = (3 * s).div_ceil(2);
        let rebuilt = cfg.rebuilds_bridge(n, s as f64) || bridge.is_none();
        if rebuilt {
            bridge = Some(find_bridge(state.witnesses(), (s / 3) as usize));
        }
        let b = bridge.as_ref().expect("set above");
        // once the set is frozen it is small, and the rectangular naive product wins
        let kernel = (!rebuilt).then_some(Kernel::Naive);
        let opts = cfg.prod_options(iteration_seed(cfg.seed, l as u64), kernel);
        let mut products = Vec::new();
        if !b.is_empty() {
            products.push(dist_prod_upd(&mut state, &all, &b.selector(), &all, cap_of(s, m), l as u64, &opts)?);
        }
        stats.push(IterationStats {
            iteration: l,
            s: s as f64,
            bridge_size: b.len(),
            rebuilt_bridge: rebuilt,
            products,
            relaxations: 0,
            elapsed_ms: elapsed_ms(t0),
        });
        observer(&IterationView { iteration: l, settled_edges: s, state: &state });
    }
    finish(state, d, Algorithm::Unweighted, stats, start)
}
