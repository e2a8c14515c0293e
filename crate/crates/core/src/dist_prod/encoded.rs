//! Min-plus product through an ordinary integer product.
//!
//! An entry `x` with `|x| <= cap` becomes `(m+1)^(cap - x)`; everything else
//! becomes 0. The ordinary product of the encoded matrices then holds, in
//! entry `(i, j)`, a sum whose largest term is `(m+1)^(2 cap - c)` with `c`
//! the capped min-plus value, and since at most `m` terms are added the
//! base-`(m+1)` logarithm recovers `c` exactly. The product is evaluated
//! modulo each prime of a basis large enough that nothing is lost.

use rayon::prelude::*;

use super::naive::check_dims;
use super::primes::{build_prime_basis, cmp_digits, PrimeBasis};
use crate::error::{ApspError, Result};
use crate::matrix::{Matrix, WeightMatrix};
use crate::weight::Weight;

/// Residues of the encoded product, one `rows x cols` matrix per prime.
pub fn encoded_residues(
    a: &WeightMatrix,
    b: &WeightMatrix,
    cap: i64,
    basis: &PrimeBasis,
) -> Result<Vec<Matrix<u64>>> {
    check_dims(a, b)?;
    let (rows, m, cols) = (a.rows(), a.cols(), b.cols());
    let base = m as u64 + 1;
    let span = 2 * cap as usize;

    Ok(basis
        .primes()
        .par_iter()
        .map(|&p| {
            let mut pw = Vec::with_capacity(span + 1);
            let mut x = 1 % p;
            for _ in 0..=span {
                pw.push(x);
                x = x * (base % p) % p;
            }
            let enc = |w: &Weight| match w.value() {
                Some(v) if v.abs() <= cap => pw[(cap - v) as usize],
                _ => 0,
            };
            let ea: Vec<u64> = a.as_slice().iter().map(enc).collect();
            let eb: Vec<u64> = b.as_slice().iter().map(enc).collect();
            let mut c = vec![0u64; rows * cols];
            if cols > 0 {
                c.chunks_mut(cols).enumerate().for_each(|(i, out)| {
                    let arow = &ea[i * m..(i + 1) * m];
                    // residues are < 2^31, so three products can be summed before reducing
                    for (chunk_idx, chunk) in arow.chunks(3).enumerate() {
                        for (off, &av) in chunk.iter().enumerate() {
                            if av == 0 {
                                continue;
                            }
                            let k = chunk_idx * 3 + off;
                            let brow = &eb[k * cols..(k + 1) * cols];
                            for (o, &bv) in out.iter_mut().zip(brow) {
                                *o += av * bv;
                            }
                        }
                        for o in out.iter_mut() {
                            *o %= p;
                        }
                    }
                });
            }
            Matrix::from_vec(rows, cols, c)
        })
        .collect())
}

/// Capped min-plus product via the encoding above. Produces no witnesses.
pub fn encoded_dist_prod(a: &WeightMatrix, b: &WeightMatrix, cap: i64) -> Result<WeightMatrix> {
    check_dims(a, b)?;
    if cap < 0 {
        return Err(ApspError::Contract(format!("negative cap {cap}")));
    }
    let (rows, m, cols) = (a.rows(), a.cols(), b.cols());
    if m == 0 {
        return Ok(Matrix::filled(rows, cols, Weight::INF));
    }
    let basis = build_prime_basis(m, cap)?;
    encoded_with_basis(a, b, cap, &basis)
}

pub(crate) fn encoded_with_basis(
    a: &WeightMatrix,
    b: &WeightMatrix,
    cap: i64,
    basis: &PrimeBasis,
) -> Result<WeightMatrix> {
    let (rows, m, cols) = (a.rows(), a.cols(), b.cols());
    let residues = encoded_residues(a, b, cap, basis)?;
    let np = basis.len();
    let base = m as u64 + 1;
    let top = 4 * cap as usize;

    // mixed-radix digits of (m+1)^e for e = 0..=4cap
    let mut pow_digits = vec![0u64; (top + 1) * np];
    pow_digits[0] = 1;
    for e in 1..=top {
        let (prev, cur) = pow_digits.split_at_mut(e * np);
        cur[..np].copy_from_slice(&prev[(e - 1) * np..]);
        basis.scale_digits(&mut cur[..np], base);
    }

    let mut out = vec![Weight::INF; rows * cols];
    if cols == 0 {
        return Ok(Matrix::from_vec(rows, cols, out));
    }
    out.par_chunks_mut(cols).enumerate().for_each(|(i, orow)| {
        let mut res = vec![0u64; np];
        let mut digits = vec![0u64; np];
        for (j, slot) in orow.iter_mut().enumerate() {
            for t in 0..np {
                res[t] = *residues[t].get(i, j);
            }
            if res.iter().all(|&r| r == 0) {
                *slot = Weight::INF;
                continue;
            }
            basis.mixed_radix(&res, &mut digits);
            // largest e with (m+1)^e <= value
            let (mut lo, mut hi) = (0usize, top);
            while lo < hi {
                let mid = (lo + hi + 1) / 2;
                let pd = &pow_digits[mid * np..(mid + 1) * np];
                if cmp_digits(pd, &digits) != std::cmp::Ordering::Greater {
                    lo = mid;
                } else {
                    hi = mid - 1;
                }
            }
            *slot = Weight::of(2 * cap - lo as i64);
        }
    });
    Ok(Matrix::from_vec(rows, cols, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist_prod::naive_dist_prod;

    fn wm(rows: &[&[Option<i64>]]) -> WeightMatrix {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|v| v.map_or(Weight::INF, Weight::of)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn all_zero() {
        let z = wm(&[&[Some(0), Some(0)], &[Some(0), Some(0)]]);
        assert_eq!(encoded_dist_prod(&z, &z, 0).unwrap(), Matrix::filled(2, 2, Weight::ZERO));
    }

    #[test]
    fn excluded_entry_decodes_to_infinity() {
        let a = wm(&[&[Some(2)]]);
        let b = wm(&[&[None]]);
        assert_eq!(encoded_dist_prod(&a, &b, 2).unwrap().as_slice(), &[Weight::INF]);
    }

    #[test]
    fn matches_naive_on_mixed_signs() {
        let a = wm(&[&[Some(-3), Some(2), None], &[Some(1), Some(-1), Some(3)]]);
        let b = wm(&[&[Some(3), None], &[Some(-2), Some(0)], &[Some(-3), Some(1)]]);
        for cap in 0..=4 {
            let naive = naive_dist_prod(&a, &b, cap).unwrap().product;
            assert_eq!(encoded_dist_prod(&a, &b, cap).unwrap(), naive, "cap {cap}");
        }
    }
}
