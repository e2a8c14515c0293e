//! Turning witness and successor tables into explicit paths.

use crate::error::{ApspError, Result};
use crate::matrix::{IndexMatrix, Matrix, SuccessorMatrix, WeightMatrix, WitnessMatrix};
use crate::weight::Weight;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathTrace {
    /// 0-based vertices from source to target.
    pub vertices: Vec<usize>,
    /// Sum of the arc weights of `d` along the trace.
    pub weight: Weight,
}

impl PathTrace {
    pub fn is_simple(&self) -> bool {
        let mut seen = self.vertices.clone();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }

    pub fn edge_count(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }
}

fn trace_weight(d: &WeightMatrix, vertices: &[usize]) -> Result<Weight> {
    vertices.windows(2).try_fold(Weight::ZERO, |acc, e| acc.checked_add(*d.get(e[0], e[1])))
}

/// Expands witnesses recursively: a pair with witness `k` becomes the path to
/// `k` followed by the path from `k`. Pairs without a witness are a single
/// arc; when there is no arc either, the result is that pseudo-arc with
/// weight `+inf`. Paths may repeat vertices when zero-weight cycles exist.
pub fn reconstruct_path(w: &WitnessMatrix, d: &WeightMatrix, i: usize, j: usize) -> Result<PathTrace> {
    expand(w, d, None, i, j)
}

/// As [`reconstruct_path`], also failing unless the stamp strictly
/// decreases from every pair to both of its halves.
pub fn reconstruct_path_with_stamps(
    w: &WitnessMatrix,
    d: &WeightMatrix,
    stamps: &Matrix<u64>,
    i: usize,
    j: usize,
) -> Result<PathTrace> {
    expand(w, d, Some(stamps), i, j)
}

fn expand(w: &WitnessMatrix, d: &WeightMatrix, stamps: Option<&Matrix<u64>>, i: usize, j: usize) -> Result<PathTrace> {
    let n = w.rows();
    if i >= n || j >= n {
        return Err(ApspError::OutOfRange(format!("pair ({}, {}) with n = {n}", i + 1, j + 1)));
    }
    if i == j && w.get(i, j).is_none() {
        return Ok(PathTrace { vertices: vec![i], weight: (*d.get(i, i)).min(Weight::ZERO) });
    }
    let budget = n.saturating_mul(n).max(1);
    let mut vertices = vec![i];
    // explicit stack of pending (from, to) pairs, processed left to right
    let mut stack = vec![(i, j)];
    let mut steps = 0usize;
    while let Some((a, b)) = stack.pop() {
        steps += 1;
        if steps > 2 * budget + 1 {
            return Err(ApspError::MalformedWitness(format!(
                "expansion of ({}, {}) exceeds {budget} arcs",
                i + 1,
                j + 1
            )));
        }
        match w.get(a, b) {
            None => vertices.push(b),
            Some(k) => {
                if let Some(t) = stamps {
                    let (tab, tak, tkb) = (*t.get(a, b), *t.get(a, k), *t.get(k, b));
                    if tak >= tab || tkb >= tab {
                        return Err(ApspError::MalformedWitness(format!(
                            "stamp does not descend at ({}, {}) via {}: {tab} -> {tak}, {tkb}",
                            a + 1,
                            b + 1,
                            k + 1
                        )));
                    }
                }
                stack.push((k, b));
                stack.push((a, k));
            }
        }
    }
    let weight = trace_weight(d, &vertices)?;
    Ok(PathTrace { vertices, weight })
}

/// Converts witnesses into successors so that every traced path is simple.
///
/// Pairs are processed in increasing stamp order. A pair with stamp 0 and a
/// finite arc gets that arc. A later pair `(i, j)` with witness `k` walks the
/// successor path from `i` towards `k` until it meets a vertex that already
/// knows its way to `j`, and points every vertex before it along that walk.
/// Walks that cannot be completed (possible only mid-run or with negative
/// cycles) are skipped, leaving the pair without a successor.
pub fn wit_to_suc(w: &WitnessMatrix, stamps: &Matrix<u64>, d: &WeightMatrix) -> SuccessorMatrix {
    let n = w.rows();
    let mut s = IndexMatrix::empty(n, n);
    for i in 0..n {
        s.set(i, i, Some(i));
    }
    let mut order: Vec<(u64, usize, usize)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let t = *stamps.get(i, j);
            if t == 0 {
                if d.get(i, j).is_finite() {
                    s.set(i, j, Some(j));
                }
            } else if w.get(i, j).is_some() {
                order.push((t, i, j));
            }
        }
    }
    order.sort_unstable();

    for &(_, i, j) in &order {
        if s.get(i, j).is_some() {
            continue;
        }
        let k = w.get(i, j).expect("filtered above");
        // dry run: the walk must reach a vertex with a successor towards j
        let mut u = i;
        let mut ok = false;
        for _ in 0..=n {
            if s.get(u, j).is_some() {
                ok = true;
                break;
            }
            match s.get(u, k) {
                Some(next) => u = next,
                None => break,
            }
        }
        if !ok {
            continue;
        }
        let mut u = i;
        while s.get(u, j).is_none() {
            let next = s.get(u, k).expect("checked by the dry run");
            s.set(u, j, Some(next));
            u = next;
        }
    }
    s
}

/// Follows successors from `i` to `j`.
pub fn trace_simple_path(s: &SuccessorMatrix, d: &WeightMatrix, i: usize, j: usize) -> Result<PathTrace> {
    trace_simple_path_counted(s, d, i, j).map(|(p, _)| p)
}

/// As [`trace_simple_path`], also returning the number of successor lookups.
pub fn trace_simple_path_counted(
    s: &SuccessorMatrix,
    d: &WeightMatrix,
    i: usize,
    j: usize,
) -> Result<(PathTrace, usize)> {
    let n = s.rows();
    if i >= n || j >= n {
        return Err(ApspError::OutOfRange(format!("pair ({}, {}) with n = {n}", i + 1, j + 1)));
    }
    if i == j {
        return Ok((PathTrace { vertices: vec![i], weight: Weight::ZERO }, 0));
    }
    let mut seen = vec![false; n];
    seen[i] = true;
    let mut vertices = vec![i];
    let mut u = i;
    let mut ops = 0;
    while u != j {
        ops += 1;
        let next = s.get(u, j).ok_or(ApspError::NoPath { from: u + 1, to: j + 1 })?;
        if next >= n || seen[next] {
            return Err(ApspError::MalformedSuccessor(format!(
                "trace from {} to {} revisits {}",
                i + 1,
                j + 1,
                next + 1
            )));
        }
        seen[next] = true;
        vertices.push(next);
        u = next;
    }
    let weight = trace_weight(d, &vertices)?;
    Ok((PathTrace { vertices, weight }, ops))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    #[test]
    fn direct_arc() {
        let d = Graph::from_one_based(2, &[(1, 2, 4)]).unwrap().to_weight_matrix();
        let w = IndexMatrix::empty(2, 2);
        let p = reconstruct_path(&w, &d, 0, 1).unwrap();
        assert_eq!(p.vertices, vec![0, 1]);
        assert_eq!(p.weight, Weight::of(4));
        let none = reconstruct_path(&w, &d, 1, 0).unwrap();
        assert_eq!(none.weight, Weight::INF);
    }

    #[test]
    fn chain_by_hand() {
        // 1 -> 2 -> 3 with w(1,3) = 2
        let d = Graph::from_one_based(3, &[(1, 2, 2), (2, 3, 5)]).unwrap().to_weight_matrix();
        let mut w = IndexMatrix::empty(3, 3);
        w.set(0, 2, Some(1));
        let mut t = Matrix::filled(3, 3, 0u64);
        t.set(0, 2, 1);
        let p = reconstruct_path_with_stamps(&w, &d, &t, 0, 2).unwrap();
        assert_eq!(p.vertices, vec![0, 1, 2]);
        assert_eq!(p.weight, Weight::of(7));

        let s = wit_to_suc(&w, &t, &d);
        assert_eq!(s.get(0, 2), Some(1));
        assert_eq!(s.get(1, 2), Some(2));
        let (p, ops) = trace_simple_path_counted(&s, &d, 0, 2).unwrap();
        assert_eq!(p.vertices, vec![0, 1, 2]);
        assert_eq!(ops, 2);
    }

    #[test]
    fn stamp_violation_is_reported() {
        let d = Graph::from_one_based(3, &[(1, 2, 2), (2, 3, 5)]).unwrap().to_weight_matrix();
        let mut w = IndexMatrix::empty(3, 3);
        w.set(0, 2, Some(1));
        let t = Matrix::filled(3, 3, 0u64);
        assert!(matches!(
            reconstruct_path_with_stamps(&w, &d, &t, 0, 2),
            Err(ApspError::MalformedWitness(_))
        ));
    }

    #[test]
    fn cyclic_witnesses_are_rejected() {
        let d = Graph::from_one_based(2, &[(1, 2, 0), (2, 1, 0)]).unwrap().to_weight_matrix();
        let mut w = IndexMatrix::empty(2, 2);
        w.set(0, 1, Some(0));
        assert!(matches!(reconstruct_path(&w, &d, 0, 1), Err(ApspError::MalformedWitness(_))));
    }

    #[test]
    fn successors_without_witnesses_are_arcs() {
        let d = Graph::from_one_based(3, &[(1, 2, 1), (3, 1, 1)]).unwrap().to_weight_matrix();
        let w = IndexMatrix::empty(3, 3);
        let s = wit_to_suc(&w, &Matrix::filled(3, 3, 0), &d);
        assert_eq!(s.get(0, 1), Some(1));
        assert_eq!(s.get(2, 0), Some(0));
        assert_eq!(s.get(0, 2), None);
        assert!(matches!(trace_simple_path(&s, &d, 0, 2), Err(ApspError::NoPath { .. })));
        assert_eq!(trace_simple_path(&s, &d, 1, 1).unwrap().vertices, vec![1]);
    }
}
