use rayon::prelude::*;

use super::DistProdOutput;
use crate::error::{ApspError, Result};
use crate::matrix::{IndexMatrix, Matrix, WeightMatrix};
use crate::weight::Weight;

/// Marks an entry that does not take part in the product.
const EXCLUDED: i64 = i64::MAX;

pub(crate) fn check_dims(a: &WeightMatrix, b: &WeightMatrix) -> Result<()> {
    if a.cols() != b.rows() {
        return Err(ApspError::DimensionMismatch(format!(
            "{}x{} times {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(())
}

/// Capped min-plus product by direct enumeration. The witness of each finite
/// entry is the smallest inner index attaining the minimum.
pub fn naive_dist_prod(a: &WeightMatrix, b: &WeightMatrix, cap: i64) -> Result<DistProdOutput> {
    let (product, witnesses) = naive_product(a, b, cap, true)?;
    Ok(DistProdOutput { product, witnesses: witnesses.expect("witnesses requested") })
}

pub(crate) fn naive_product(
    a: &WeightMatrix,
    b: &WeightMatrix,
    cap: i64,
    with_witnesses: bool,
) -> Result<(WeightMatrix, Option<IndexMatrix>)> {
    check_dims(a, b)?;
    if cap < 0 {
        return Err(ApspError::Contract(format!("negative cap {cap}")));
    }
    let (rows, m, cols) = (a.rows(), a.cols(), b.cols());
    if rows == 0 || cols == 0 {
        let w = with_witnesses.then(|| IndexMatrix::empty(rows, cols));
        return Ok((Matrix::filled(rows, cols, Weight::INF), w));
    }

    let bf: Vec<i64> =
        b.as_slice().iter().map(|w| if w.within(cap) { w.to_raw() } else { EXCLUDED }).collect();
    let mut acc = vec![EXCLUDED; rows * cols];
    let mut wit = vec![0u32; if with_witnesses { rows * cols } else { 0 }];

    let row_kernel = |i: usize, out: &mut [i64], wrow: Option<&mut [u32]>| {
        let arow = a.row(i);
        match wrow {
            Some(wrow) => {
                for k in 0..m {
                    let av = arow[k];
                    if !av.within(cap) {
                        continue;
                    }
                    let av = av.to_raw();
                    let brow = &bf[k * cols..(k + 1) * cols];
                    let tag = k as u32 + 1;
                    for j in 0..cols {
                        let bv = brow[j];
                        if bv != EXCLUDED {
                            // |av|, |bv| <= 2^61 so the sum cannot wrap
                            let s = av + bv;
                            if s < out[j] {
                                out[j] = s;
                                wrow[j] = tag;
                            }
                        }
                    }
                }
            }
            None => {
                for k in 0..m {
                    let av = arow[k];
                    if !av.within(cap) {
                        continue;
                    }
                    let av = av.to_raw();
                    let brow = &bf[k * cols..(k + 1) * cols];
                    for j in 0..cols {
                        let bv = brow[j];
                        if bv != EXCLUDED {
                            out[j] = out[j].min(av + bv);
                        }
                    }
                }
            }
        }
    };

    if with_witnesses {
        acc.par_chunks_mut(cols)
            .zip(wit.par_chunks_mut(cols))
            .enumerate()
            .for_each(|(i, (out, wrow))| row_kernel(i, out, Some(wrow)));
    } else {
        acc.par_chunks_mut(cols).enumerate().for_each(|(i, out)| row_kernel(i, out, None));
    }

    let mut product = Vec::with_capacity(rows * cols);
    for &v in &acc {
        if v == EXCLUDED {
            product.push(Weight::INF);
        } else {
            product.push(
                Weight::finite(v).ok_or_else(|| ApspError::Overflow(format!("product entry {v}")))?,
            );
        }
    }
    let witnesses = with_witnesses.then(|| IndexMatrix::from_raw(Matrix::from_vec(rows, cols, wit)));
    Ok((Matrix::from_vec(rows, cols, product), witnesses))
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
    fn single_entry_identity() {
        let a = wm(&[&[Some(0)]]);
        let out = naive_dist_prod(&a, &a, 0).unwrap();
        assert_eq!(out.product.as_slice(), &[Weight::ZERO]);
        assert_eq!(out.witnesses.get(0, 0), Some(0));
    }

    #[test]
    fn cap_filters_entries() {
        let a = wm(&[&[Some(1), Some(10)]]);
        let b = wm(&[&[Some(5)], &[Some(2)]]);
        for cap in [10, 9] {
            let out = naive_dist_prod(&a, &b, cap).unwrap();
            assert_eq!(out.product.as_slice(), &[Weight::of(6)]);
            assert_eq!(out.witnesses.get(0, 0), Some(0));
        }
        let out = naive_dist_prod(&a, &b, 4).unwrap();
        assert_eq!(out.product.as_slice(), &[Weight::INF]);
        assert_eq!(out.witnesses.get(0, 0), None);
    }

    #[test]
    fn rejects_mismatched_dimensions() {
        let a = wm(&[&[Some(1), Some(2)]]);
        assert!(matches!(naive_dist_prod(&a, &a, 3), Err(ApspError::DimensionMismatch(_))));
    }

    #[test]
    fn overflow_is_reported() {
        let big = crate::weight::FINITE_MAX;
        let a = wm(&[&[Some(big)]]);
        assert!(matches!(naive_dist_prod(&a, &a, i64::MAX), Err(ApspError::Overflow(_))));
    }
}
