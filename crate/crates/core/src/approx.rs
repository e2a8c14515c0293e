//! `(1 + eps)`-approximate shortest paths for nonnegative weights by
//! adaptive scaling: each product is computed exactly on coarsened copies of
//! its inputs, one per scale, and the smallest rescaled answer wins.

use std::time::Instant;

use serde::Serialize;

use crate::dist_prod::{dist_prod_with, ProdOptions, WitnessMode};
use crate::error::{ApspError, Result};
use crate::matrix::{IndexMatrix, Matrix, WeightMatrix, WitnessMatrix};
use crate::weight::Weight;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ScaleParams {
    /// Largest value that survives truncation; a power of two.
    pub m_bound: i64,
    /// Resolution `R`: scaled entries lie in `0..=R`. A power of two, at least 4.
    pub resolution: i64,
}

impl ScaleParams {
    pub fn new(m_bound: i64, resolution: i64) -> Result<Self> {
        let pow2 = |x: i64| x > 0 && x & (x - 1) == 0;
        if !pow2(m_bound) || !pow2(resolution) || resolution < 4 {
            return Err(ApspError::Config(format!(
                "M = {m_bound} and R = {resolution} must be powers of two with R >= 4"
            )));
        }
        Ok(ScaleParams { m_bound, resolution })
    }

    /// Scale exponents visited by [`approx_dist_prod`].
    pub fn levels(&self) -> std::ops::RangeInclusive<u32> {
        let lo = self.resolution.trailing_zeros();
        let hi = ceil_log2(self.m_bound as u64).max(lo);
        lo..=hi
    }

    /// Guaranteed per-product stretch `1 + 4 / R`.
    pub fn stretch(&self) -> f64 {
        1.0 + 4.0 / self.resolution as f64
    }
}

fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        u64::BITS - (x - 1).leading_zeros()
    }
}

fn check_nonnegative(a: &WeightMatrix) -> Result<()> {
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let w = *a.get(i, j);
            if w < Weight::ZERO {
                return Err(ApspError::Contract(format!("entry ({}, {}) = {w} is negative", i + 1, j + 1)));
            }
        }
    }
    Ok(())
}

/// `ceil(R a / M)` for entries in `0..=M`, `+inf` otherwise.
pub fn scale_matrix(a: &WeightMatrix, m_bound: i64, resolution: i64) -> Result<WeightMatrix> {
    check_nonnegative(a)?;
    if m_bound <= 0 || resolution <= 0 {
        return Err(ApspError::Config(format!("M = {m_bound} and R = {resolution} must be positive")));
    }
    Ok(a.map(|w| match w.value() {
        Some(v) if v <= m_bound => {
            let scaled = (v as i128 * resolution as i128 + m_bound as i128 - 1) / m_bound as i128;
            Weight::of(scaled as i64)
        }
        _ => Weight::INF,
    }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxProduct {
    pub product: WeightMatrix,
    pub witnesses: WitnessMatrix,
    /// Scale exponent `r` whose product attained each finite entry.
    pub levels: Matrix<u32>,
}

/// Approximate product of nonnegative matrices: every finite entry `c` of the
/// result satisfies `cbar <= c <= (1 + 4/R) cbar`, where `cbar` is the exact
/// product of the inputs with entries above `M` removed.
pub fn approx_dist_prod(a: &WeightMatrix, b: &WeightMatrix, m_bound: i64, resolution: i64) -> Result<WeightMatrix> {
    let opts = ProdOptions::new(WitnessMode::None, 0);
    Ok(approx_dist_prod_with(a, b, ScaleParams::new(m_bound, resolution)?, &opts)?.product)
}

pub fn approx_dist_prod_with(
    a: &WeightMatrix,
    b: &WeightMatrix,
    params: ScaleParams,
    opts: &ProdOptions,
) -> Result<ApproxProduct> {
    check_nonnegative(a)?;
    check_nonnegative(b)?;
    let (rows, cols) = (a.rows(), b.cols());
    let r_res = params.resolution;
    let mut product = Matrix::filled(rows, cols, Weight::INF);
    let mut witnesses = IndexMatrix::empty(rows, cols);
    let mut levels = Matrix::filled(rows, cols, 0u32);
    for r in params.levels() {
        let scale = 1i64 << r;
        // truncation at M happens here too: nothing above M fits under any scale <= M
        let clip = |x: &WeightMatrix| x.map(|w| if w.value().is_some_and(|v| v > params.m_bound) { Weight::INF } else { *w });
        let sa = scale_matrix(&clip(a), scale, r_res)?;
        let sb = scale_matrix(&clip(b), scale, r_res)?;
        let out = dist_prod_with(&sa, &sb, r_res, opts)?.output;
        let factor = scale / r_res;
        for i in 0..rows {
            for j in 0..cols {
                let Some(v) = out.product.get(i, j).value() else { continue };
                let cand = Weight::of(v * factor);
                if cand < *product.get(i, j) {
                    product.set(i, j, cand);
                    witnesses.set(i, j, out.witnesses.get(i, j));
                    levels.set(i, j, r);
                }
            }
        }
    }
    Ok(ApproxProduct { product, witnesses, levels })
}

/// Smallest power of two that is `>= x` (and at least 1).
fn next_pow2(x: f64) -> Result<i64> {
    if !(x <= (1u64 << 61) as f64) {
        return Err(ApspError::Overflow(format!("scale bound {x} is too large")));
    }
    Ok((x.ceil().max(1.0) as u64).next_power_of_two() as i64)
}

#[derive(Clone, Debug, Serialize)]
pub struct ApproxStats {
    pub n: usize,
    pub max_abs_weight: i64,
    pub epsilon: f64,
    pub params: ScaleParams,
    pub iterations: usize,
    /// `(1 + 4/R)^iterations`, at most `1 + eps`.
    pub stretch_bound: f64,
    pub improved: Vec<usize>,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug)]
pub struct ApproxResult {
    pub distances: WeightMatrix,
    pub witnesses: WitnessMatrix,
    pub stamps: Matrix<u64>,
    pub stats: ApproxStats,
}

/// Resolution and bound used by [`approx_short_path`] for `n` vertices,
/// largest weight `max_weight` and relative error `epsilon`.
pub fn approx_params(n: usize, max_weight: i64, epsilon: f64) -> Result<ScaleParams> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(ApspError::Config(format!("epsilon must be positive, got {epsilon}")));
    }
    let levels = ceil_log2(n as u64) as f64;
    let resolution = next_pow2((4.0 * levels / epsilon.ln_1p()).max(4.0))?;
    // estimates may exceed the largest distance by the stretch, so the bound covers that too
    let m_bound = next_pow2((1.0 + epsilon) * max_weight as f64 * n as f64)?;
    ScaleParams::new(m_bound, resolution)
}

/// Repeated approximate squaring: `ceil(log2 n)` products, each within a
/// factor `1 + 4/R`, so every estimate lies in `[delta, (1 + eps) delta]`.
pub fn approx_short_path(d: &WeightMatrix, epsilon: f64) -> Result<ApproxResult> {
    approx_short_path_with(d, approx_params(d.rows(), d.max_abs_finite(), epsilon)?, epsilon, 0)
}

/// As [`approx_short_path`] with explicit scale parameters.
pub fn approx_short_path_with(d: &WeightMatrix, params: ScaleParams, epsilon: f64, seed: u64) -> Result<ApproxResult> {
    let start = Instant::now();
    if !d.is_square() {
        return Err(ApspError::DimensionMismatch(format!("distance matrix is {}x{}", d.rows(), d.cols())));
    }
    check_nonnegative(d)?;
    let n = d.rows();
    let mut f = d.clone();
    for i in 0..n {
        f.set(i, i, Weight::ZERO);
    }
    let mut w = IndexMatrix::empty(n, n);
    let mut t = Matrix::filled(n, n, 0u64);
    let iterations = ceil_log2(n as u64) as usize;
    let mut improved = Vec::with_capacity(iterations);
    for l in 1..=iterations {
        let opts = ProdOptions::new(WitnessMode::Any, crate::exact::iteration_seed(seed, l as u64));
        let out = approx_dist_prod_with(&f, &f, params, &opts)?;
        let mut count = 0;
        for i in 0..n {
            for j in 0..n {
                let v = *out.product.get(i, j);
                if v < *f.get(i, j) {
                    f.set(i, j, v);
                    w.set(i, j, out.witnesses.get(i, j));
                    t.set(i, j, l as u64);
                    count += 1;
                }
            }
        }
        improved.push(count);
    }
    let stats = ApproxStats {
        n,
        max_abs_weight: d.max_abs_finite(),
        epsilon,
        params,
        iterations,
        stretch_bound: params.stretch().powi(iterations as i32),
        improved,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    Ok(ApproxResult { distances: f, witnesses: w, stamps: t, stats })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wm(rows: &[&[i64]]) -> WeightMatrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| Weight::of(v)).collect()).collect()).unwrap()
    }

    #[test]
    fn scaling_formula() {
        assert_eq!(scale_matrix(&wm(&[&[5]]), 8, 4).unwrap(), wm(&[&[3]]));
        assert_eq!(scale_matrix(&wm(&[&[0, 8]]), 8, 4).unwrap(), wm(&[&[0, 4]]));
        assert_eq!(*scale_matrix(&wm(&[&[9]]), 8, 4).unwrap().get(0, 0), Weight::INF);
        assert!(matches!(scale_matrix(&wm(&[&[-1]]), 8, 4), Err(ApspError::Contract(_))));
    }

    #[test]
    fn params_validation() {
        assert!(ScaleParams::new(8, 2).is_err());
        assert!(ScaleParams::new(12, 4).is_err());
        let p = ScaleParams::new(8, 16).unwrap();
        // the scale loop still runs once when M < R
        assert_eq!(p.levels(), 4..=4);
        assert_eq!(ScaleParams::new(1024, 16).unwrap().levels(), 4..=10);
    }

    #[test]
    fn small_entries_are_exact() {
        let a = wm(&[&[0, 3], &[1, 0]]);
        let c = approx_dist_prod(&a, &a, 16, 16).unwrap();
        assert_eq!(c, wm(&[&[0, 3], &[1, 0]]));
        assert_eq!(approx_dist_prod(&wm(&[&[0]]), &wm(&[&[0]]), 4, 4).unwrap(), wm(&[&[0]]));
    }

    #[test]
    fn resolution_follows_epsilon() {
        let p = approx_params(16, 10, 0.5).unwrap();
        // 4 * 4 / ln 1.5 = 39.5
        assert_eq!(p.resolution, 64);
        assert_eq!(p.m_bound, 256);
        assert!(p.stretch().powi(4) <= 1.5);
        assert!(approx_params(16, 10, 0.0).is_err());
    }
}
