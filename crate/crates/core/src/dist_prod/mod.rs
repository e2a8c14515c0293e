//! Capped distance (min-plus) products.
//!
//! Entries whose absolute value exceeds the cap are treated as `+inf`. Two
//! kernels compute the same product: a direct enumeration and an encoded
//! variant that goes through an ordinary integer product modulo word-sized
//! primes. [`dist_prod_with`] picks one from a cost model.

mod encoded;
mod naive;
pub mod primes;
mod witness;

use std::sync::OnceLock;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use encoded::{encoded_dist_prod, encoded_residues};
pub use naive::naive_dist_prod;
pub use primes::{build_prime_basis, PrimeBasis};
pub use witness::{is_valid_witness, smallest_witness_product, witnesses_by_bits, witnesses_by_sampling};
pub(crate) use witness::witnesses_by_sampling_with;

use crate::error::{ApspError, Result};
use crate::matrix::{IndexMatrix, WeightMatrix};

/// Use as the cap when no entry should be excluded.
pub const UNCAPPED: i64 = i64::MAX;

/// Default number of random subsets per scale, per `log2 n`, when sampling witnesses.
pub const DEFAULT_CONFIDENCE: u32 = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistProdOutput {
    pub product: WeightMatrix,
    /// Inner index attaining each finite entry; `None` for infinite entries.
    pub witnesses: IndexMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kernel {
    Naive,
    Encoded,
}

impl std::fmt::Display for Kernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Kernel::Naive => "naive",
            Kernel::Encoded => "encoded",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessMode {
    /// Smallest attaining inner index, identical across kernels.
    ExactSmallest,
    /// Any attaining inner index.
    Any,
    /// Product only; the witness matrix is left empty.
    None,
}

/// Per-operation costs, in nanoseconds, used to choose a kernel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    /// One add-compare step of the naive kernel.
    pub naive_op: f64,
    /// One multiply-add step of the encoded kernel, per prime.
    pub modmul_op: f64,
    /// One digit step of the per-entry mixed-radix decode.
    pub decode_op: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel { naive_op: 1.0, modmul_op: 0.6, decode_op: 3.0 }
    }
}

impl CostModel {
    /// Costs timed on this machine. Measured once per process.
    pub fn measured() -> CostModel {
        static MEASURED: OnceLock<CostModel> = OnceLock::new();
        *MEASURED.get_or_init(calibrate)
    }

    pub fn naive_cost(&self, rows: usize, m: usize, cols: usize) -> f64 {
        rows as f64 * m as f64 * cols as f64 * self.naive_op
    }

    /// Estimated encoded cost, or `None` when no prime basis covers `(m, cap)`.
    pub fn encoded_cost(&self, rows: usize, m: usize, cols: usize, cap: i64, mode: WitnessMode) -> Option<f64> {
        if m == 0 {
            return Some(0.0);
        }
        let primes = build_prime_basis(m, cap).ok()?.len() as f64;
        let cells = rows as f64 * cols as f64;
        let product = primes * cells * m as f64 * self.modmul_op + cells * primes * primes * self.decode_op;
        let bits = (usize::BITS - m.saturating_sub(1).leading_zeros()) as f64;
        Some(match mode {
            WitnessMode::None => product,
            WitnessMode::ExactSmallest => product + self.naive_cost(rows, m, cols),
            WitnessMode::Any => product * (1.0 + bits),
        })
    }

    pub fn choose(&self, rows: usize, m: usize, cols: usize, cap: i64, mode: WitnessMode) -> Kernel {
        match self.encoded_cost(rows, m, cols, cap, mode) {
            Some(enc) if enc < self.naive_cost(rows, m, cols) => Kernel::Encoded,
            _ => Kernel::Naive,
        }
    }
}

fn calibrate() -> CostModel {
    use crate::matrix::Matrix;
    use crate::weight::Weight;
    let n = 96;
    let a = Matrix::from_vec(n, n, (0..n * n).map(|x| Weight::of((x % 7) as i64 - 3)).collect());
    let ops = (n * n * n) as f64;
    let time = |f: &dyn Fn()| {
        let start = Instant::now();
        f();
        start.elapsed().as_nanos() as f64
    };
    let naive = time(&|| {
        let _ = naive::naive_product(&a, &a, 3, false);
    });
    let basis = build_prime_basis(n, 3).expect("small basis");
    let enc = time(&|| {
        let _ = encoded_residues(&a, &a, 3, &basis);
    });
    let dec = time(&|| {
        let _ = encoded::encoded_with_basis(&a, &a, 3, &basis);
    }) - enc;
    let p = basis.len() as f64;
    CostModel {
        naive_op: (naive / ops).max(1e-3),
        modmul_op: (enc / (ops * p)).max(1e-3),
        decode_op: (dec / ((n * n) as f64 * p * p)).max(1e-3),
    }
}

#[derive(Clone, Debug)]
pub struct ProdOptions {
    pub witness_mode: WitnessMode,
    /// Overrides the cost model's kernel choice.
    pub kernel: Option<Kernel>,
    pub confidence: u32,
    pub seed: u64,
    pub cost: CostModel,
}

impl ProdOptions {
    pub fn new(witness_mode: WitnessMode, seed: u64) -> Self {
        ProdOptions { witness_mode, kernel: None, confidence: DEFAULT_CONFIDENCE, seed, cost: CostModel::default() }
    }
}

#[derive(Clone, Debug)]
pub struct ProdReport {
    pub output: DistProdOutput,
    pub kernel: Kernel,
    /// The encoded kernel was requested but no prime basis covered the cap.
    pub fell_back: bool,
}

/// Product with the cost-model kernel and default options.
pub fn dist_prod(
    a: &WeightMatrix,
    b: &WeightMatrix,
    cap: i64,
    witness_mode: WitnessMode,
    seed: u64,
) -> Result<DistProdOutput> {
    Ok(dist_prod_with(a, b, cap, &ProdOptions::new(witness_mode, seed))?.output)
}

pub fn dist_prod_with(a: &WeightMatrix, b: &WeightMatrix, cap: i64, opts: &ProdOptions) -> Result<ProdReport> {
    naive::check_dims(a, b)?;
    if cap < 0 {
        return Err(ApspError::Contract(format!("negative cap {cap}")));
    }
    let (rows, m, cols) = (a.rows(), a.cols(), b.cols());
    let wanted = opts
        .kernel
        .unwrap_or_else(|| opts.cost.choose(rows, m, cols, cap, opts.witness_mode));

    let basis = match wanted {
        Kernel::Encoded if m > 0 => build_prime_basis(m, cap).ok(),
        _ => None,
    };
    let fell_back = wanted == Kernel::Encoded && m > 0 && basis.is_none();

    let Some(basis) = basis else {
        let output = match opts.witness_mode {
            WitnessMode::None => {
                let (product, _) = naive::naive_product(a, b, cap, false)?;
                DistProdOutput { product, witnesses: IndexMatrix::empty(rows, cols) }
            }
            _ => naive_dist_prod(a, b, cap)?,
        };
        let kernel = if m == 0 { wanted } else { Kernel::Naive };
        return Ok(ProdReport { output, kernel, fell_back });
    };

    let product = encoded::encoded_with_basis(a, b, cap, &basis)?;
    let witnesses = match opts.witness_mode {
        WitnessMode::None => IndexMatrix::empty(rows, cols),
        WitnessMode::ExactSmallest => {
            let exact = smallest_witness_product(a, b, cap)?;
            debug_assert_eq!(exact.product, product);
            exact.witnesses
        }
        WitnessMode::Any => witness::witnesses_by_sampling_with(
            a,
            b,
            cap,
            &product,
            opts.confidence,
            opts.seed,
            Kernel::Encoded,
        )?,
    };
    Ok(ProdReport { output: DistProdOutput { product, witnesses }, kernel: Kernel::Encoded, fell_back: false })
}

/// Product without witnesses on an explicitly chosen kernel, falling back to
/// the naive kernel when the encoded one cannot cover the cap.
pub(crate) fn product_only(a: &WeightMatrix, b: &WeightMatrix, cap: i64, kernel: Kernel) -> Result<WeightMatrix> {
    if kernel == Kernel::Encoded && a.cols() > 0 {
        if let Ok(basis) = build_prime_basis(a.cols(), cap) {
            return encoded::encoded_with_basis(a, b, cap, &basis);
        }
    }
    Ok(naive::naive_product(a, b, cap, false)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;
    use crate::weight::Weight;

    #[test]
    fn huge_cap_dispatches_naive() {
        let a = Matrix::filled(4, 4, Weight::of(1));
        let mut opts = ProdOptions::new(WitnessMode::Any, 1);
        opts.kernel = Some(Kernel::Encoded);
        let rep = dist_prod_with(&a, &a, 1 << 40, &opts).unwrap();
        assert_eq!(rep.kernel, Kernel::Naive);
        assert!(rep.fell_back);
        assert_eq!(rep.output, naive_dist_prod(&a, &a, 1 << 40).unwrap());

        let rep = dist_prod_with(&a, &a, 1 << 40, &ProdOptions::new(WitnessMode::Any, 1)).unwrap();
        assert_eq!(rep.kernel, Kernel::Naive);
    }

    #[test]
    fn forced_encoded_exact_smallest_matches_naive() {
        let a = Matrix::from_vec(3, 2, [1, 0, -2, 2, 0, 0].map(Weight::of).to_vec());
        let b = Matrix::from_vec(2, 3, [0, 1, 2, -2, -1, 0].map(Weight::of).to_vec());
        let mut opts = ProdOptions::new(WitnessMode::ExactSmallest, 7);
        opts.kernel = Some(Kernel::Encoded);
        let rep = dist_prod_with(&a, &b, 2, &opts).unwrap();
        assert_eq!(rep.kernel, Kernel::Encoded);
        assert_eq!(rep.output, naive_dist_prod(&a, &b, 2).unwrap());
    }

    #[test]
    fn default_model_is_deterministic() {
        let c = CostModel::default();
        assert_eq!(c.choose(64, 64, 64, 2, WitnessMode::Any), c.choose(64, 64, 64, 2, WitnessMode::Any));
        assert_eq!(c.choose(64, 64, 64, 2, WitnessMode::Any), Kernel::Naive);
    }
}
