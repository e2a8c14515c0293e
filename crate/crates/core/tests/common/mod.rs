#![allow(dead_code)]

use bridging_apsp::exact::ApspResult;
use bridging_apsp::generate::{random_graph, GenParams};
use bridging_apsp::graph::{Edge, Graph};
use bridging_apsp::matrix::{Matrix, WeightMatrix};
use bridging_apsp::paths::{reconstruct_path_with_stamps, trace_simple_path};
use bridging_apsp::Weight;

/// Floyd-Warshall over plain `Option<i128>`, kept separate from the library oracle.
pub fn fw(g: &Graph) -> Vec<Vec<Option<i128>>> {
    let n = g.n();
    let mut d = vec![vec![None; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(0);
    }
    for e in g.edges() {
        let w = e.weight as i128;
        let cell = &mut d[e.from][e.to];
        if cell.is_none_or(|c| w < c) {
            *cell = Some(w);
        }
    }
    for k in 0..n {
        for i in 0..n {
            let Some(ik) = d[i][k] else { continue };
            for j in 0..n {
                if let Some(kj) = d[k][j] {
                    if d[i][j].is_none_or(|c| ik + kj < c) {
                        d[i][j] = Some(ik + kj);
                    }
                }
            }
        }
    }
    d
}

pub fn as_matrix(d: &[Vec<Option<i128>>]) -> WeightMatrix {
    let n = d.len();
    Matrix::from_vec(
        n,
        n,
        d.iter().flatten().map(|v| v.map_or(Weight::INF, |x| Weight::of(x as i64))).collect(),
    )
}

pub fn truth(g: &Graph) -> WeightMatrix {
    as_matrix(&fw(g))
}

/// Problems with a finished exact solve: distances, witnesses, stamps and
/// both path recoveries, each checked against the true distances.
pub fn audit(r: &ApspResult, d: &WeightMatrix, want: &WeightMatrix) -> Vec<String> {
    let n = d.rows();
    let mut bad = Vec::new();
    if r.distances != *want {
        bad.push("distances differ from Floyd-Warshall".to_string());
        return bad;
    }
    let succ = r.successors(d);
    for i in 0..n {
        for j in 0..n {
            let f = *want.get(i, j);
            if !f.is_finite() {
                continue;
            }
            match r.witnesses.get(i, j) {
                Some(k) => {
                    let (fik, fkj) = (want.get(i, k).value(), want.get(k, j).value());
                    let sums = matches!((fik, fkj), (Some(a), Some(b)) if Weight::of(a + b) == f);
                    if !sums {
                        bad.push(format!("witness {k} for ({i}, {j}) is not on a shortest path"));
                    }
                    let t = *r.stamps.get(i, j);
                    if *r.stamps.get(i, k) >= t || *r.stamps.get(k, j) >= t {
                        bad.push(format!("stamps do not descend at ({i}, {j}) through {k}"));
                    }
                }
                None => {
                    let direct = if i == j { Weight::ZERO } else { *d.get(i, j) };
                    if direct != f {
                        bad.push(format!("({i}, {j}) has no witness but is not a direct arc"));
                    }
                }
            }
            match reconstruct_path_with_stamps(&r.witnesses, d, &r.stamps, i, j) {
                Ok(p) if p.weight == f => {}
                other => bad.push(format!("witness path ({i}, {j}): {other:?}")),
            }
            match trace_simple_path(&succ, d, i, j) {
                Ok(p) if p.weight == f && p.is_simple() => {}
                other => bad.push(format!("successor path ({i}, {j}): {other:?}")),
            }
        }
    }
    bad
}

/// Same arcs with every weight set to 1.
pub fn unit_version(g: &Graph) -> Graph {
    Graph::new(g.n(), g.edges().iter().map(|e| Edge { weight: 1, ..*e })).unwrap()
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub n: usize,
    pub max_weight: i64,
    pub density: f64,
    pub seed: u64,
    pub graph: Graph,
}

/// `count` negative-cycle-free digraphs spread over n in [2, 60],
/// M in {1, 3, 5, 10} and density in {0.1, 0.3, 0.7}.
pub fn exact_grid(count: usize, base_seed: u64) -> Vec<Instance> {
    const MS: [i64; 4] = [1, 3, 5, 10];
    const DENS: [f64; 3] = [0.1, 0.3, 0.7];
    (0..count)
        .map(|c| {
            let seed = base_seed.wrapping_add(c as u64);
            let n = 2 + (c * 37 + c / 12) % 59;
            let max_weight = MS[c % 4];
            let density = DENS[(c / 4) % 3];
            let graph = random_graph(&GenParams::new(n, density, -max_weight, max_weight, seed)).unwrap();
            Instance { n, max_weight, density, seed, graph }
        })
        .collect()
}

/// Entries in `[-max_abs, max_abs]`, `+inf` with probability `p_inf`.
pub fn random_matrix(rng: &mut impl rand::Rng, rows: usize, cols: usize, max_abs: i64, p_inf: f64) -> WeightMatrix {
    use rand::RngExt;
    let data = (0..rows * cols)
        .map(|_| if rng.random_bool(p_inf) { Weight::INF } else { Weight::of(rng.random_range(-max_abs..=max_abs)) })
        .collect();
    Matrix::from_vec(rows, cols, data)
}

/// A rectangular product instance with sides up to `max_side` and a cap up
/// to `max_cap`; some entries sit just above the cap.
pub fn kernel_case(rng: &mut impl rand::Rng, max_side: usize, max_cap: i64) -> (WeightMatrix, WeightMatrix, i64) {
    use rand::RngExt;
    let rows = rng.random_range(1..=max_side);
    let m = rng.random_range(1..=max_side);
    let cols = rng.random_range(1..=max_side);
    let cap = rng.random_range(0..=max_cap);
    let spread = cap + rng.random_range(0..=2);
    let p_inf = [0.0, 0.2, 0.6][rng.random_range(0..3usize)];
    (random_matrix(rng, rows, m, spread, p_inf), random_matrix(rng, m, cols, spread, p_inf), cap)
}
