//! Exact all-pairs shortest paths by capped distance products over
//! bridging sets.

mod negcycle;
mod rand;
mod squaring;
mod unweighted;
mod weighted;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use negcycle::{detect_negative_cycle, propagate_neg_infinity};
pub use rand::rand_short_path;
pub use squaring::squaring_short_path;
pub use unweighted::unwght_short_path;
pub use weighted::short_path;

use crate::dist_prod::{
    dist_prod_with, witnesses_by_sampling_with, CostModel, DistProdOutput, Kernel, ProdOptions, WitnessMode,
    DEFAULT_CONFIDENCE,
};
use crate::error::{ApspError, Result};
use crate::matrix::{IndexMatrix, Matrix, Selector, SuccessorMatrix, WeightMatrix, WitnessMatrix};
use crate::paths::wit_to_suc;
use crate::weight::Weight;

/// Seed used when the caller does not pick one.
pub const DEFAULT_SEED: u64 = 0x5eed_2b1d_6e0f_a11e;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    /// Random bridging sets.
    Rand,
    /// Deterministic bridging sets, any integer weights.
    Det,
    /// Deterministic bridging sets, unit weights only.
    Unweighted,
    /// Plain repeated squaring.
    Naive,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Rand => "rand",
            Algorithm::Det => "det",
            Algorithm::Unweighted => "unweighted",
            Algorithm::Naive => "naive",
        })
    }
}

impl FromStr for Algorithm {
    type Err = ApspError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rand" => Ok(Algorithm::Rand),
            "det" => Ok(Algorithm::Det),
            "unweighted" => Ok(Algorithm::Unweighted),
            "naive" => Ok(Algorithm::Naive),
            other => Err(ApspError::Config(format!("unknown algorithm {other:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub seed: u64,
    /// Bridging sets are recomputed while `s <= n^theta` and reused after.
    pub bridging_threshold: f64,
    /// Random subsets per scale when sampling witnesses.
    pub witness_confidence: u32,
    pub force_kernel: Option<Kernel>,
    pub cost: CostModel,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            seed: DEFAULT_SEED,
            bridging_threshold: 0.5,
            witness_confidence: DEFAULT_CONFIDENCE,
            force_kernel: None,
            cost: CostModel::default(),
        }
    }
}

impl SolverConfig {
    pub fn with_seed(seed: u64) -> Self {
        SolverConfig { seed, ..SolverConfig::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bridging_threshold > 0.0 && self.bridging_threshold <= 1.0) {
            return Err(ApspError::Config(format!(
                "bridging threshold must lie in (0, 1], got {}",
                self.bridging_threshold
            )));
        }
        Ok(())
    }

    fn prod_options(&self, seed: u64, kernel: Option<Kernel>) -> ProdOptions {
        ProdOptions {
            witness_mode: WitnessMode::Any,
            kernel: self.force_kernel.or(kernel),
            confidence: self.witness_confidence,
            seed,
            cost: self.cost,
        }
    }

    fn rebuilds_bridge(&self, n: usize, s: f64) -> bool {
        s <= (n as f64).powf(self.bridging_threshold) + 1e-9
    }
}

/// Mixes the run seed with an iteration number (splitmix64 finalizer).
pub fn iteration_seed(seed: u64, iteration: u64) -> u64 {
    let mut z = seed ^ iteration.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductStats {
    pub rows: usize,
    pub inner: usize,
    pub cols: usize,
    pub cap: i64,
    pub kernel: Kernel,
    pub improved: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationStats {
    pub iteration: usize,
    pub s: f64,
    pub bridge_size: usize,
    pub rebuilt_bridge: bool,
    pub products: Vec<ProductStats>,
    /// Single-entry relaxations made outside the products.
    pub relaxations: usize,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostics {
    pub algorithm: Algorithm,
    pub n: usize,
    pub max_abs_weight: i64,
    pub iterations: Vec<IterationStats>,
    /// The final matrix was checked to be closed under extension by one arc,
    /// which together with the upper-bound invariant makes it exact.
    pub certified: bool,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug)]
pub struct ApspResult {
    pub distances: WeightMatrix,
    pub witnesses: WitnessMatrix,
    /// Logical time of the last improvement of each entry; 0 means never.
    pub stamps: Matrix<u64>,
    pub negative_cycle: Option<Vec<usize>>,
    pub diagnostics: Diagnostics,
}

impl ApspResult {
    pub fn n(&self) -> usize {
        self.distances.rows()
    }

    pub fn successors(&self, d: &WeightMatrix) -> SuccessorMatrix {
        wit_to_suc(&self.witnesses, &self.stamps, d)
    }
}

/// A snapshot handed to observers after every iteration.
pub struct IterationView<'a> {
    pub iteration: usize,
    /// Pairs whose shortest paths use at most this many edges must be settled.
    pub settled_edges: u64,
    pub state: &'a SolverState,
}

pub type Observer<'a> = &'a mut dyn FnMut(&IterationView<'_>);

/// The matrices a solver refines: distances, witnesses and stamps.
#[derive(Clone, Debug)]
pub struct SolverState {
    f: WeightMatrix,
    w: WitnessMatrix,
    t: Matrix<u64>,
    clock: u64,
}

impl SolverState {
    /// Starts from the arc matrix, with each diagonal entry at most 0.
    pub fn new(d: &WeightMatrix) -> Result<Self> {
        if !d.is_square() {
            return Err(ApspError::DimensionMismatch(format!(
                "distance matrix is {}x{}",
                d.rows(),
                d.cols()
            )));
        }
        if d.contains_neg_inf() {
            return Err(ApspError::Contract("arc weights must not be -inf".into()));
        }
        let n = d.rows();
        let mut f = d.clone();
        for i in 0..n {
            f.set(i, i, (*d.get(i, i)).min(Weight::ZERO));
        }
        Ok(SolverState { f, w: IndexMatrix::empty(n, n), t: Matrix::filled(n, n, 0), clock: 0 })
    }

    pub fn n(&self) -> usize {
        self.f.rows()
    }

    pub fn distances(&self) -> &WeightMatrix {
        &self.f
    }

    pub fn witnesses(&self) -> &WitnessMatrix {
        &self.w
    }

    pub fn stamps(&self) -> &Matrix<u64> {
        &self.t
    }

    /// A fresh stamp larger than every stamp handed out so far.
    pub fn tick(&mut self) -> u64 {
        self.clock += 1;
        self.clock
    }

    /// Sets one entry if `value` improves it.
    pub fn relax(&mut self, i: usize, j: usize, value: Weight, witness: Option<usize>, stamp: u64) -> bool {
        if value < *self.f.get(i, j) {
            self.f.set(i, j, value);
            self.w.set(i, j, witness);
            self.t.set(i, j, stamp);
            self.clock = self.clock.max(stamp);
            true
        } else {
            false
        }
    }
}

/// `F[rows, inner] * F[inner, cols]` capped at `cap`, merged into `F` where it
/// improves, with witnesses mapped back through `inner` and the given stamp.
///
/// Witnesses are only needed for improved entries. The naive kernel yields
/// them for free; after an encoded product they are recovered for the
/// improved entries alone.
pub fn dist_prod_upd(
    state: &mut SolverState,
    rows: &Selector,
    inner: &Selector,
    cols: &Selector,
    cap: i64,
    stamp: u64,
    opts: &ProdOptions,
) -> Result<ProductStats> {
    let mut stats =
        ProductStats { rows: rows.len(), inner: inner.len(), cols: cols.len(), cap, kernel: Kernel::Naive, improved: 0 };
    if rows.is_empty() || inner.is_empty() || cols.is_empty() {
        return Ok(stats);
    }
    let a = state.f.select(rows, inner)?;
    let b = state.f.select(inner, cols)?;
    let kernel = opts
        .kernel
        .unwrap_or_else(|| opts.cost.choose(rows.len(), inner.len(), cols.len(), cap, opts.witness_mode));
    let mut prod_opts = opts.clone();
    prod_opts.kernel = Some(kernel);
    prod_opts.witness_mode = match kernel {
        Kernel::Naive => WitnessMode::ExactSmallest,
        Kernel::Encoded => WitnessMode::None,
    };
    let report = dist_prod_with(&a, &b, cap, &prod_opts)?;
    stats.kernel = report.kernel;
    let DistProdOutput { product, mut witnesses } = report.output;

    let mut improved = Matrix::filled(rows.len(), cols.len(), Weight::INF);
    for (p, &i) in rows.indices().iter().enumerate() {
        for (q, &j) in cols.indices().iter().enumerate() {
            let v = *product.get(p, q);
            if v < *state.f.get(i, j) {
                improved.set(p, q, v);
                stats.improved += 1;
            }
        }
    }
    if stats.improved > 0 && prod_opts.witness_mode == WitnessMode::None {
        witnesses = witnesses_by_sampling_with(&a, &b, cap, &improved, opts.confidence, opts.seed, report.kernel)?;
    }
    for (p, &i) in rows.indices().iter().enumerate() {
        for (q, &j) in cols.indices().iter().enumerate() {
            let v = *improved.get(p, q);
            if v.is_finite() {
                let k = witnesses.get(p, q).map(|x| inner.indices()[x]);
                state.f.set(i, j, v);
                state.w.set(i, j, k);
                state.t.set(i, j, stamp);
            }
        }
    }
    state.clock = state.clock.max(stamp);
    Ok(stats)
}

/// `x * y`, saturating at the largest cap.
fn cap_of(s: u64, m: i64) -> i64 {
    (s as i128 * m as i128).min(i64::MAX as i128) as i64
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Shared tail of every solver: negative cycles, certification, packaging.
fn finish(
    state: SolverState,
    d: &WeightMatrix,
    algorithm: Algorithm,
    iterations: Vec<IterationStats>,
    start: Instant,
) -> Result<ApspResult> {
    let n = state.n();
    let max_abs_weight = d.max_abs_finite();
    let SolverState { f, w, t, .. } = state;
    let mut result = ApspResult {
        distances: f,
        witnesses: w,
        stamps: t,
        negative_cycle: None,
        diagnostics: Diagnostics { algorithm, n, max_abs_weight, iterations, certified: false, elapsed_ms: 0.0 },
    };
    negcycle::settle(&mut result, d);
    result.diagnostics.elapsed_ms = elapsed_ms(start);
    Ok(result)
}

/// Runs one of the solvers.
pub fn solve(algorithm: Algorithm, d: &WeightMatrix, cfg: &SolverConfig) -> Result<ApspResult> {
    solve_observed(algorithm, d, cfg, &mut |_| {})
}

/// Runs one of the solvers, calling `observer` after every iteration.
pub fn solve_observed(
    algorithm: Algorithm,
    d: &WeightMatrix,
    cfg: &SolverConfig,
    observer: Observer<'_>,
) -> Result<ApspResult> {
    cfg.validate()?;
    match algorithm {
        Algorithm::Rand => rand::run(d, cfg, observer),
        Algorithm::Det => weighted::run(d, cfg, observer),
        Algorithm::Unweighted => unweighted::run(d, cfg, observer),
        Algorithm::Naive => squaring::run(d, cfg, observer),
    }
}

/// Smallest `L` with `base^L >= n`.
fn iteration_count(n: usize, base: f64) -> usize {
    let mut l = 0;
    let mut p = 1.0f64;
    while p < n as f64 {
        p *= base;
        l += 1;
    }
    l
}
