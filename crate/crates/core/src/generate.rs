//! Seeded random digraphs for tests, benchmarks and the `gen` subcommand.

use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{ApspError, Result};
use crate::graph::{Edge, Graph};

#[derive(Clone, Debug, PartialEq)]
pub struct GenParams {
    pub n: usize,
    /// Probability of each ordered pair `(u, v)`, `u != v`, being an arc.
    pub density: f64,
    pub min_weight: i64,
    pub max_weight: i64,
    /// Drop arcs that would close a negative cycle.
    pub avoid_negative_cycles: bool,
    pub seed: u64,
}

impl GenParams {
    pub fn new(n: usize, density: f64, min_weight: i64, max_weight: i64, seed: u64) -> Self {
        GenParams { n, density, min_weight, max_weight, avoid_negative_cycles: true, seed }
    }
}

/// Arcs are drawn independently and inserted in random order. With
/// `avoid_negative_cycles`, an arc `(u, v, w)` is rejected when
/// `dist(v, u) + w < 0` in the graph built so far.
pub fn random_graph(p: &GenParams) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p.density) || p.min_weight > p.max_weight {
        return Err(ApspError::Config(format!(
            "density {} or weight range [{}, {}] is invalid",
            p.density, p.min_weight, p.max_weight
        )));
    }
    let n = p.n;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.random_bool(p.density) {
                edges.push(Edge { from: u, to: v, weight: rng.random_range(p.min_weight..=p.max_weight) });
            }
        }
    }
    if p.avoid_negative_cycles && p.min_weight < 0 {
        edges.shuffle(&mut rng);
        edges = keep_acyclic_in_sign(n, edges);
        edges.sort_by_key(|e| (e.from, e.to));
    }
    Graph::new(n, edges)
}

/// Incrementally maintained distances; `None` is unreachable.
fn keep_acyclic_in_sign(n: usize, edges: Vec<Edge>) -> Vec<Edge> {
    let mut dist: Vec<Option<i128>> = vec![None; n * n];
    for i in 0..n {
        dist[i * n + i] = Some(0);
    }
    let mut kept = Vec::with_capacity(edges.len());
    for e in edges {
        let w = e.weight as i128;
        if let Some(back) = dist[e.to * n + e.from] {
            if back + w < 0 {
                continue;
            }
        }
        for x in 0..n {
            let Some(xu) = dist[x * n + e.from] else { continue };
            for y in 0..n {
                if let Some(vy) = dist[e.to * n + y] {
                    let cand = xu + w + vy;
                    let cell = &mut dist[x * n + y];
                    if cell.is_none_or(|c| cand < c) {
                        *cell = Some(cand);
                    }
                }
            }
        }
        kept.push(e);
    }
    kept
}

/// Unit-weight digraph.
pub fn random_unweighted(n: usize, density: f64, seed: u64) -> Result<Graph> {
    random_graph(&GenParams::new(n, density, 1, 1, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::bellman_ford_all;

    #[test]
    fn generated_graphs_have_no_negative_cycles() {
        for seed in 0..20 {
            let g = random_graph(&GenParams::new(15, 0.7, -5, 5, seed)).unwrap();
            assert!(!bellman_ford_all(&g).unwrap().has_negative_cycle, "seed {seed}");
            assert!(g.edges().iter().all(|e| (-5..=5).contains(&e.weight)));
        }
    }

    #[test]
    fn same_seed_same_graph() {
        let p = GenParams::new(12, 0.3, -3, 3, 42);
        assert_eq!(random_graph(&p).unwrap().edges(), random_graph(&p).unwrap().edges());
        let mut q = p.clone();
        q.avoid_negative_cycles = false;
        q.density = 1.0;
        assert_eq!(random_graph(&q).unwrap().edges().len(), 12 * 11);
    }
}
