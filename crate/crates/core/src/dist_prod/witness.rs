//! Witness recovery for products computed without them.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::naive::{check_dims, naive_product};
use super::{product_only, DistProdOutput, Kernel};
use crate::error::{ApspError, Result};
use crate::matrix::{IndexMatrix, Matrix, Selector, WeightMatrix};
use crate::weight::{Weight, FINITE_MAX};

/// Does `k` attain `c(i, j)` with both summands inside the cap?
pub fn is_valid_witness(
    a: &WeightMatrix,
    b: &WeightMatrix,
    cap: i64,
    c: &WeightMatrix,
    i: usize,
    j: usize,
    k: usize,
) -> bool {
    let target = match c.get(i, j).value() {
        Some(v) => v,
        None => return false,
    };
    if k >= a.cols() {
        return false;
    }
    let (x, y) = (*a.get(i, k), *b.get(k, j));
    x.within(cap) && y.within(cap) && x.to_raw() + y.to_raw() == target
}

/// Product and smallest witnesses in one pass: `a'(i,k) = m a(i,k) + k` and
/// `b'(k,j) = m b(k,j)`, so the uncapped product of the transformed matrices
/// carries the product in its quotient and the witness in its remainder.
pub fn smallest_witness_product(a: &WeightMatrix, b: &WeightMatrix, cap: i64) -> Result<DistProdOutput> {
    check_dims(a, b)?;
    if cap < 0 {
        return Err(ApspError::Contract(format!("negative cap {cap}")));
    }
    let (rows, m, cols) = (a.rows(), a.cols(), b.cols());
    if m == 0 {
        return Ok(DistProdOutput {
            product: Matrix::filled(rows, cols, Weight::INF),
            witnesses: IndexMatrix::empty(rows, cols),
        });
    }
    let effective = cap.min(a.max_abs_finite().max(b.max_abs_finite()));
    let mi = m as i128;
    if 2 * mi * effective as i128 + mi > FINITE_MAX as i128 {
        return Err(ApspError::Overflow(format!("scaled entries for m={m}, cap={effective}")));
    }
    let m64 = m as i64;
    let mut ta = Matrix::filled(rows, m, Weight::INF);
    for i in 0..rows {
        for k in 0..m {
            let x = *a.get(i, k);
            if x.within(cap) {
                ta.set(i, k, Weight::of(m64 * x.to_raw() + k as i64));
            }
        }
    }
    let tb = b.map(|&y| if y.within(cap) { Weight::of(m64 * y.to_raw()) } else { Weight::INF });
    let (scaled, _) = naive_product(&ta, &tb, i64::MAX, false)?;

    let mut product = Matrix::filled(rows, cols, Weight::INF);
    let mut witnesses = IndexMatrix::empty(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            if let Some(v) = scaled.get(i, j).value() {
                product.set(i, j, Weight::of(v.div_euclid(m64)));
                witnesses.set(i, j, Some(v.rem_euclid(m64) as usize));
            }
        }
    }
    Ok(DistProdOutput { product, witnesses })
}

/// Number of bits needed for the 0-based indices below `m`.
fn index_bits(m: usize) -> u32 {
    usize::BITS - m.saturating_sub(1).leading_zeros()
}

/// Candidate witness per entry from the products over the bit classes of
/// the inner indices in `subset`. Raw 0-based candidates, possibly invalid.
fn bit_candidates(
    a: &WeightMatrix,
    b: &WeightMatrix,
    cap: i64,
    c: &WeightMatrix,
    subset: &[usize],
    kernel: Kernel,
) -> Result<Matrix<u32>> {
    let (rows, cols) = (a.rows(), b.cols());
    let mut cand = Matrix::filled(rows, cols, 0u32);
    let all_rows = Selector::all(rows);
    let all_cols = Selector::all(cols);
    for bit in 0..index_bits(a.cols()) {
        let class: Vec<usize> = subset.iter().copied().filter(|&k| (k >> bit) & 1 == 1).collect();
        if class.is_empty() {
            continue;
        }
        let sel = Selector::new(class)?;
        let pa = a.select(&all_rows, &sel)?;
        let pb = b.select(&sel, &all_cols)?;
        let part = product_only(&pa, &pb, cap, kernel)?;
        for i in 0..rows {
            for j in 0..cols {
                let target = *c.get(i, j);
                if target.is_finite() && *part.get(i, j) == target {
                    *cand.get_mut(i, j) |= 1 << bit;
                }
            }
        }
    }
    Ok(cand)
}

/// Candidate witnesses from `ceil(log2 m)` products over the index sets
/// `{k : bit l of k is 1}`. Entries with a unique witness get it; others get
/// a candidate the caller must validate. Infinite entries get none.
pub fn witnesses_by_bits(a: &WeightMatrix, b: &WeightMatrix, cap: i64, c: &WeightMatrix) -> Result<IndexMatrix> {
    witnesses_by_bits_with(a, b, cap, c, Kernel::Naive)
}

pub(crate) fn witnesses_by_bits_with(
    a: &WeightMatrix,
    b: &WeightMatrix,
    cap: i64,
    c: &WeightMatrix,
    kernel: Kernel,
) -> Result<IndexMatrix> {
    check_dims(a, b)?;
    let m = a.cols();
    let all: Vec<usize> = (0..m).collect();
    let raw = bit_candidates(a, b, cap, c, &all, kernel)?;
    let mut out = IndexMatrix::empty(a.rows(), b.cols());
    for i in 0..a.rows() {
        for j in 0..b.cols() {
            let k = *raw.get(i, j) as usize;
            if c.get(i, j).is_finite() && k < m {
                out.set(i, j, Some(k));
            }
        }
    }
    Ok(out)
}

/// Complete, validated witnesses. Runs the bit technique on random inner
/// subsets of shrinking size so that most entries see a unique witness, then
/// scans linearly for anything still missing.
pub fn witnesses_by_sampling(
    a: &WeightMatrix,
    b: &WeightMatrix,
    cap: i64,
    c: &WeightMatrix,
    confidence: u32,
    seed: u64,
) -> Result<IndexMatrix> {
    witnesses_by_sampling_with(a, b, cap, c, confidence, seed, Kernel::Naive)
}

pub(crate) fn witnesses_by_sampling_with(
    a: &WeightMatrix,
    b: &WeightMatrix,
    cap: i64,
    c: &WeightMatrix,
    confidence: u32,
    seed: u64,
    kernel: Kernel,
) -> Result<IndexMatrix> {
    check_dims(a, b)?;
    let (rows, m, cols) = (a.rows(), a.cols(), b.cols());
    let mut out = IndexMatrix::empty(rows, cols);
    let mut missing: usize = 0;
    for i in 0..rows {
        for j in 0..cols {
            if c.get(i, j).is_finite() {
                missing += 1;
            }
        }
    }
    let absorb = |cand: &Matrix<u32>, out: &mut IndexMatrix, missing: &mut usize| {
        for i in 0..rows {
            for j in 0..cols {
                let k = *cand.get(i, j) as usize;
                if out.get(i, j).is_none() && is_valid_witness(a, b, cap, c, i, j, k) {
                    out.set(i, j, Some(k));
                    *missing -= 1;
                }
            }
        }
    };

    if missing > 0 && m > 0 {
        let all: Vec<usize> = (0..m).collect();
        let cand = bit_candidates(a, b, cap, c, &all, kernel)?;
        absorb(&cand, &mut out, &mut missing);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rows.max(cols).max(2);
    let draws = confidence as usize * (usize::BITS - (n - 1).leading_zeros()) as usize;
    let scales = if m > 1 { usize::BITS - 1 - m.leading_zeros() } else { 0 };
    'outer: for r in 1..=scales {
        let size = m.div_ceil(1 << r);
        for _ in 0..draws {
            if missing == 0 {
                break 'outer;
            }
            let mut subset = index::sample(&mut rng, m, size).into_vec();
            subset.sort_unstable();
            let cand = bit_candidates(a, b, cap, c, &subset, kernel)?;
            absorb(&cand, &mut out, &mut missing);
        }
    }

    if missing > 0 {
        for i in 0..rows {
            for j in 0..cols {
                if out.get(i, j).is_none() && c.get(i, j).is_finite() {
                    let k = (0..m).find(|&k| is_valid_witness(a, b, cap, c, i, j, k));
                    match k {
                        Some(k) => out.set(i, j, Some(k)),
                        None => {
                            return Err(ApspError::Contract(format!(
                                "entry ({}, {}) of the given product has no witness",
                                i + 1,
                                j + 1
                            )))
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wm(rows: &[&[Option<i64>]]) -> WeightMatrix {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|v| v.map_or(Weight::INF, Weight::of)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn smallest_witness_examples() {
        let a = wm(&[&[Some(1), Some(10)]]);
        let b = wm(&[&[Some(5)], &[Some(2)]]);
        let out = smallest_witness_product(&a, &b, 10).unwrap();
        assert_eq!(out.product.as_slice(), &[Weight::of(6)]);
        assert_eq!(out.witnesses.get(0, 0), Some(0));

        let a = wm(&[&[Some(3), Some(1)]]);
        let b = wm(&[&[Some(0)], &[Some(2)]]);
        let out = smallest_witness_product(&a, &b, 10).unwrap();
        assert_eq!(out.product.as_slice(), &[Weight::of(3)]);
        assert_eq!(out.witnesses.get(0, 0), Some(0));

        let a = wm(&[&[None, None]]);
        let b = wm(&[&[Some(0)], &[Some(0)]]);
        let out = smallest_witness_product(&a, &b, 5).unwrap();
        assert_eq!(out.product.as_slice(), &[Weight::INF]);
        assert_eq!(out.witnesses.get(0, 0), None);
    }

    #[test]
    fn negative_entries_decode_with_euclidean_division() {
        let a = wm(&[&[Some(-3), Some(-1), Some(-3)]]);
        let b = wm(&[&[Some(-2)], &[Some(-4)], &[Some(-3)]]);
        let out = smallest_witness_product(&a, &b, 5).unwrap();
        assert_eq!(out.product.as_slice(), &[Weight::of(-6)]);
        assert_eq!(out.witnesses.get(0, 0), Some(2));
    }

    #[test]
    fn bits_find_unique_witness() {
        let a = wm(&[&[Some(1), Some(10)]]);
        let b = wm(&[&[Some(5)], &[Some(2)]]);
        let c = wm(&[&[Some(6)]]);
        let w = witnesses_by_bits(&a, &b, 10, &c).unwrap();
        assert_eq!(w.get(0, 0), Some(0));
    }

    #[test]
    fn bits_with_one_inner_index() {
        let a = wm(&[&[Some(2)], &[None]]);
        let b = wm(&[&[Some(1), Some(-1)]]);
        let c = crate::dist_prod::naive_dist_prod(&a, &b, 3).unwrap().product;
        let w = witnesses_by_bits(&a, &b, 3, &c).unwrap();
        assert_eq!(w.get(0, 0), Some(0));
        assert_eq!(w.get(0, 1), Some(0));
        assert_eq!(w.get(1, 0), None);
    }

    #[test]
    fn all_ties_candidate_is_still_a_witness() {
        let a = wm(&[&[Some(0), Some(0)]]);
        let b = wm(&[&[Some(0)], &[Some(0)]]);
        let c = wm(&[&[Some(0)]]);
        let w = witnesses_by_bits(&a, &b, 1, &c).unwrap();
        let k = w.get(0, 0).unwrap();
        assert!(is_valid_witness(&a, &b, 1, &c, 0, 0, k));
    }
}
