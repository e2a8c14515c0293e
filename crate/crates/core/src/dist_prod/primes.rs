//! Word-sized prime moduli and Chinese-remainder reconstruction.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{ApspError, Result};

/// Number of primes in the fixed table.
pub const TABLE_SIZE: usize = 512;
const TABLE_START: u64 = 1 << 30;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Miller-Rabin with bases 2, 3, 5, 7, exact below 3,215,031,751.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The ascending table of the first primes above 2^30. All are below 2^31,
/// so a product of two residues fits comfortably in a `u64`.
pub fn prime_table() -> &'static [u64] {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = Vec::with_capacity(TABLE_SIZE);
        let mut c = TABLE_START + 1;
        while out.len() < TABLE_SIZE {
            if is_prime(c) {
                out.push(c);
            }
            c += 2;
        }
        out
    })
}

#[derive(Clone, Debug)]
pub struct PrimeBasis {
    primes: Vec<u64>,
    modulus: BigUint,
    /// `inv[t][s] = p_s^{-1} mod p_t` for `s < t`.
    inv: Vec<Vec<u64>>,
}

/// Largest value the encoded product can take for inner dimension `m` and
/// cap `cap`: `m * (m+1)^(4 cap)`.
pub fn encoded_bound(m: usize, cap: i64) -> BigUint {
    BigUint::from(m as u64) * BigUint::from(m as u64 + 1).pow(4 * cap as u32)
}

/// Shortest prefix of the prime table whose product exceeds the largest
/// possible encoded entry.
pub fn build_prime_basis(m: usize, cap: i64) -> Result<PrimeBasis> {
    if m == 0 {
        return Err(ApspError::Contract("prime basis needs an inner dimension of at least 1".into()));
    }
    if cap < 0 {
        return Err(ApspError::Contract(format!("negative cap {cap}")));
    }
    let table = prime_table();
    // every table prime exceeds 2^30, so this bit estimate only errs toward trying
    let bits_needed = (m as f64).log2() + 4.0 * cap as f64 * ((m + 1) as f64).log2();
    if bits_needed >= 31.0 * TABLE_SIZE as f64 {
        return Err(ApspError::Config(format!(
            "encoded product for m={m}, cap={cap} needs ~{bits_needed:.0} bits of modulus; \
             use the naive kernel"
        )));
    }
    let bound = encoded_bound(m, cap);
    let mut modulus = BigUint::one();
    let mut primes = Vec::new();
    for &p in table {
        primes.push(p);
        modulus *= p;
        if modulus > bound {
            return Ok(PrimeBasis::from_primes(primes, modulus));
        }
    }
    Err(ApspError::Config(format!(
        "prime table too small for m={m}, cap={cap}; use the naive kernel"
    )))
}

impl PrimeBasis {
    fn from_primes(primes: Vec<u64>, modulus: BigUint) -> PrimeBasis {
        let inv = (0..primes.len())
            .map(|t| (0..t).map(|s| pow_mod(primes[s] % primes[t], primes[t] - 2, primes[t])).collect())
            .collect();
        PrimeBasis { primes, modulus, inv }
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Mixed-radix digits of the value with the given residues, least
    /// significant first: `x = d0 + d1 p0 + d2 p0 p1 + ...`.
    pub fn mixed_radix(&self, residues: &[u64], digits: &mut [u64]) {
        for t in 0..self.primes.len() {
            let p = self.primes[t];
            let inv = &self.inv[t];
            let mut x = residues[t] % p;
            for s in 0..t {
                // primes ascend, so digits[s] < p and every operand stays below 2^32
                x = (x + p - digits[s]) * inv[s] % p;
            }
            digits[t] = x;
        }
    }

    /// Multiplies a mixed-radix value by `c` in place. The product must stay
    /// below the modulus.
    pub fn scale_digits(&self, digits: &mut [u64], c: u64) {
        let mut carry: u128 = 0;
        for (d, &p) in digits.iter_mut().zip(&self.primes) {
            let v = *d as u128 * c as u128 + carry;
            *d = (v % p as u128) as u64;
            carry = v / p as u128;
        }
        debug_assert_eq!(carry, 0, "scaled value exceeds the modulus");
    }

    /// The unique value below the modulus with the given residues.
    pub fn reconstruct(&self, residues: &[u64]) -> BigUint {
        let mut digits = vec![0; self.primes.len()];
        self.mixed_radix(residues, &mut digits);
        let mut x = BigUint::default();
        for t in (0..self.primes.len()).rev() {
            x = x * self.primes[t] + digits[t];
        }
        x
    }
}

/// Compares two mixed-radix digit strings, least significant digit first.
pub(crate) fn cmp_digits(a: &[u64], b: &[u64]) -> std::cmp::Ordering {
    a.iter().rev().cmp(b.iter().rev())
}
