//! Bridging sets: vertex sets that meet some shortest path of every pair
//! whose shortest paths need many edges.

use std::cmp::Reverse;
use std::collections::BTreeSet;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{ApspError, Result};
use crate::matrix::{Selector, WeightMatrix, WitnessMatrix};
use crate::weight::Weight;

#[derive(Clone, Debug, PartialEq)]
pub struct BridgingSet {
    /// Strictly increasing 0-based vertices.
    pub vertices: Vec<usize>,
    /// The parameter the set was built for.
    pub s: f64,
}

impl BridgingSet {
    pub fn all(n: usize, s: f64) -> Self {
        BridgingSet { vertices: (0..n).collect(), s }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn selector(&self) -> Selector {
        Selector::new(self.vertices.clone()).expect("bridging sets are sorted")
    }
}

/// `min(1, 9 ln n / s)`.
pub fn inclusion_probability(n: usize, s: f64) -> f64 {
    (9.0 * (n as f64).ln() / s).min(1.0)
}

/// Includes each vertex independently with [`inclusion_probability`].
pub fn rand_bridging_set(n: usize, s: f64, seed: u64) -> Result<BridgingSet> {
    if n == 0 || !(s >= 1.0) {
        return Err(ApspError::Contract(format!("random bridging set needs n >= 1 and s >= 1, got n = {n}, s = {s}")));
    }
    let p = inclusion_probability(n, s);
    if p >= 1.0 {
        return Ok(BridgingSet::all(n, s));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vertices = (0..n).filter(|_| rng.random_bool(p)).collect();
    Ok(BridgingSet { vertices, s })
}

/// Up to `s` intermediate vertices of the path traced by `w` from `i` to
/// `j`, sorted. The budget bounds the work even when `w` is inconsistent.
pub fn sub_path(w: &WitnessMatrix, i: usize, j: usize, s: usize) -> Vec<usize> {
    let mut out = Vec::new();
    collect(w, i, j, s, &mut out);
    out.sort_unstable();
    out.dedup();
    out
}

fn collect(w: &WitnessMatrix, i: usize, j: usize, s: usize, out: &mut Vec<usize>) {
    let Some(k) = w.get(i, j) else { return };
    if s == 0 {
        return;
    }
    let before = out.len();
    collect(w, i, k, s - 1, out);
    let left = out.len() - before;
    out.push(k);
    collect(w, k, j, s - left - 1, out);
}

fn sum(x: Weight, y: Weight) -> Option<Weight> {
    if x.is_inf() || y.is_inf() {
        return None;
    }
    x.checked_add(y).ok()
}

/// Like [`sub_path`] on the walk from `i` to `j`, while relaxing
/// `f(a, k) <- f(a, i) + f(i, k)` and `f(k, b) <- f(k, j) + f(j, b)` for each
/// collected `k`, so that `f(a, k) + f(k, b) <= f(a, b)` afterwards.
#[allow(clippy::too_many_arguments)]
pub fn sub_path_upd(
    f: &mut WeightMatrix,
    w: &mut WitnessMatrix,
    a: usize,
    b: usize,
    i: usize,
    j: usize,
    s: usize,
) -> Vec<usize> {
    let mut out = Vec::new();
    collect_upd(f, w, a, b, i, j, s, &mut out, &mut |_, _| {});
    out.sort_unstable();
    out.dedup();
    out
}

/// As [`sub_path_upd`], reporting every entry it changes to `touch`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn collect_upd(
    f: &mut WeightMatrix,
    w: &mut WitnessMatrix,
    a: usize,
    b: usize,
    i: usize,
    j: usize,
    s: usize,
    out: &mut Vec<usize>,
    touch: &mut dyn FnMut(usize, usize),
) {
    let Some(k) = w.get(i, j) else { return };
    if s == 0 {
        return;
    }
    if let Some(v) = sum(*f.get(a, i), *f.get(i, k)) {
        if v < *f.get(a, k) {
            f.set(a, k, v);
            w.set(a, k, Some(i));
            touch(a, k);
        }
    }
    if let Some(v) = sum(*f.get(k, j), *f.get(j, b)) {
        if v < *f.get(k, b) {
            f.set(k, b, v);
            w.set(k, b, Some(j));
            touch(k, b);
        }
    }
    let before = out.len();
    collect_upd(f, w, a, b, i, k, s - 1, out, touch);
    let left = out.len() - before;
    out.push(k);
    collect_upd(f, w, a, b, k, j, s - left - 1, out, touch);
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HittingStats {
    pub sets: usize,
    /// Largest number of sets sharing one element.
    pub delta: usize,
    pub min_set_size: usize,
    /// `(ln delta + 1) n / min_set_size` with the observed `delta`.
    pub greedy_bound: f64,
    /// The same bound with `delta` replaced by its worst case `n^2`.
    pub greedy_bound_worst: f64,
}

/// Greedy hitting set: repeatedly takes the element in the most unhit sets,
/// smallest index first on ties.
pub fn hitting_set(collection: &[Vec<usize>], n: usize) -> Result<BridgingSet> {
    Ok(hitting_set_with_stats(collection, n)?.0)
}

pub fn hitting_set_with_stats(collection: &[Vec<usize>], n: usize) -> Result<(BridgingSet, HittingStats)> {
    let mut sets: Vec<Vec<usize>> = Vec::with_capacity(collection.len());
    for (idx, set) in collection.iter().enumerate() {
        if set.is_empty() {
            return Err(ApspError::Contract(format!("set {idx} of the collection is empty")));
        }
        if let Some(&v) = set.iter().find(|&&v| v >= n) {
            return Err(ApspError::OutOfRange(format!("element {} outside 1..{n}", v + 1)));
        }
        let mut s = set.clone();
        s.sort_unstable();
        s.dedup();
        sets.push(s);
    }

    let mut member_of: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (idx, set) in sets.iter().enumerate() {
        for &v in set {
            member_of[v].push(idx);
        }
    }
    let mut count: Vec<usize> = member_of.iter().map(Vec::len).collect();
    let delta = count.iter().copied().max().unwrap_or(0);
    let mut queue: BTreeSet<(Reverse<usize>, usize)> =
        (0..n).filter(|&v| count[v] > 0).map(|v| (Reverse(count[v]), v)).collect();
    let mut hit = vec![false; sets.len()];
    let mut chosen = Vec::new();
    while let Some((Reverse(c), v)) = queue.pop_first() {
        if c == 0 {
            break;
        }
        chosen.push(v);
        for &idx in &member_of[v] {
            if hit[idx] {
                continue;
            }
            hit[idx] = true;
            for &u in &sets[idx] {
                if u != v && count[u] > 0 {
                    queue.remove(&(Reverse(count[u]), u));
                    count[u] -= 1;
                    if count[u] > 0 {
                        queue.insert((Reverse(count[u]), u));
                    }
                }
            }
        }
        count[v] = 0;
    }
    chosen.sort_unstable();

    let min_set_size = sets.iter().map(Vec::len).min().unwrap_or(0);
    let bound = |d: f64| {
        if min_set_size == 0 {
            0.0
        } else {
            (d.max(1.0).ln() + 1.0) * n as f64 / min_set_size as f64
        }
    };
    let stats = HittingStats {
        sets: sets.len(),
        delta,
        min_set_size,
        greedy_bound: bound(delta as f64),
        greedy_bound_worst: bound((n * n) as f64),
    };
    Ok((BridgingSet { vertices: chosen, s: min_set_size as f64 }, stats))
}

/// `n (2 ln n + 1) / s`, the size guarantee for [`find_bridge`].
pub fn bridging_size_bound(n: usize, s: usize) -> f64 {
    let nf = n as f64;
    nf * (2.0 * nf.max(1.0).ln() + 1.0) / s.max(1) as f64
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BridgeStats {
    pub hitting: HittingStats,
    pub size_bound: f64,
}

/// Deterministic `s`-bridging set from witnesses that trace shortest paths
/// of up to `s` edges. `s = 0` yields all vertices.
pub fn find_bridge(w: &WitnessMatrix, s: usize) -> BridgingSet {
    find_bridge_with_stats(w, s).0
}

pub fn find_bridge_with_stats(w: &WitnessMatrix, s: usize) -> (BridgingSet, BridgeStats) {
    let n = w.rows();
    if s == 0 {
        return (BridgingSet::all(n, 0.0), trivial_stats(n));
    }
    let mut collection = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let mut u = Vec::with_capacity(s + 1);
            collect(w, i, j, s - 1, &mut u);
            push_if_large(&mut collection, u, i, j, s);
        }
    }
    finish(collection, n, s)
}

/// [`find_bridge`] driven by [`sub_path_upd`], relaxing `f` and `w` along
/// the way. Pairs are visited in row-major order.
pub fn find_bridge_upd(f: &mut WeightMatrix, w: &mut WitnessMatrix, s: usize) -> BridgingSet {
    find_bridge_upd_with_stats(f, w, s).0
}

pub fn find_bridge_upd_with_stats(f: &mut WeightMatrix, w: &mut WitnessMatrix, s: usize) -> (BridgingSet, BridgeStats) {
    let n = w.rows();
    if s == 0 {
        return (BridgingSet::all(n, 0.0), trivial_stats(n));
    }
    let mut collection = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let mut u = Vec::with_capacity(s + 1);
            collect_upd(f, w, i, j, i, j, s - 1, &mut u, &mut |_, _| {});
            push_if_large(&mut collection, u, i, j, s);
        }
    }
    finish(collection, n, s)
}

fn push_if_large(collection: &mut Vec<Vec<usize>>, mut u: Vec<usize>, i: usize, j: usize, s: usize) {
    u.push(i);
    u.push(j);
    u.sort_unstable();
    u.dedup();
    if u.len() >= s {
        collection.push(u);
    }
}

fn finish(collection: Vec<Vec<usize>>, n: usize, s: usize) -> (BridgingSet, BridgeStats) {
    let (mut b, hitting) = hitting_set_with_stats(&collection, n).expect("collected sets are nonempty and in range");
    b.s = s as f64;
    (b, BridgeStats { hitting, size_bound: bridging_size_bound(n, s) })
}

fn trivial_stats(n: usize) -> BridgeStats {
    BridgeStats {
        hitting: HittingStats { sets: 0, delta: 0, min_set_size: 0, greedy_bound: 0.0, greedy_bound_worst: 0.0 },
        size_bound: n as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::IndexMatrix;

    #[test]
    fn random_sets_at_the_extremes() {
        assert_eq!(rand_bridging_set(10, 1.0, 3).unwrap().vertices, (0..10).collect::<Vec<_>>());
        assert!(rand_bridging_set(1, 2.0, 3).unwrap().is_empty());
        assert!(rand_bridging_set(0, 2.0, 3).is_err());
        assert!(rand_bridging_set(5, 0.5, 3).is_err());
        assert_eq!(rand_bridging_set(100, 50.0, 9).unwrap(), rand_bridging_set(100, 50.0, 9).unwrap());
    }

    #[test]
    fn hitting_small_collections() {
        assert_eq!(hitting_set(&[vec![0, 1], vec![1, 2]], 3).unwrap().vertices, vec![1]);
        assert!(hitting_set(&[], 3).unwrap().is_empty());
        assert!(matches!(hitting_set(&[vec![]], 3), Err(ApspError::Contract(_))));
        assert!(matches!(hitting_set(&[vec![3]], 3), Err(ApspError::OutOfRange(_))));
        // ties go to the smallest index
        assert_eq!(hitting_set(&[vec![2, 0], vec![1, 3]], 4).unwrap().vertices, vec![0, 1]);
    }

    fn chain_witnesses(n: usize) -> IndexMatrix {
        // witness of (i, j) on a directed path: the vertex just before j
        let mut w = IndexMatrix::empty(n, n);
        for i in 0..n {
            for j in i + 2..n {
                w.set(i, j, Some(j - 1));
            }
        }
        w
    }

    #[test]
    fn sub_path_on_a_chain() {
        let w = chain_witnesses(5);
        assert_eq!(sub_path(&w, 0, 4, 10), vec![1, 2, 3]);
        let two = sub_path(&w, 0, 4, 2);
        assert_eq!(two.len(), 2);
        assert!(two.iter().all(|v| (1..4).contains(v)));
        assert!(sub_path(&w, 0, 1, 5).is_empty());
        assert!(sub_path(&w, 0, 4, 0).is_empty());
    }

    #[test]
    fn find_bridge_on_a_chain() {
        let w = chain_witnesses(8);
        let b = find_bridge(&w, 3);
        assert!(!b.is_empty());
        assert!(b.len() as f64 <= bridging_size_bound(8, 3));
        // every triple of consecutive vertices is hit
        for i in 0..6 {
            assert!((i..i + 3).any(|v| b.contains(v)), "{b:?} misses {i}..{}", i + 3);
        }
        assert_eq!(find_bridge(&w, 1).len(), 8);
        assert_eq!(find_bridge(&w, 0).len(), 8);
    }
}
