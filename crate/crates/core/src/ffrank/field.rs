//! Prime-field configuration and scalar helpers. Every prime is below `2^32`,
//! so a product of two reduced entries fits in a `u64`.

use serde::{Deserialize, Serialize};

use super::OracleError;

pub const DEFAULT_PRIME: u64 = 1_000_003;
/// Largest prime below `2^31 - 1`; used once after the primary prime's retries fail.
pub const SECONDARY_PRIME: u64 = 2_147_483_629;
pub const DEFAULT_RETRIES: u32 = 3;
pub const DEFAULT_SEED: u64 = 0x5EC4_2A17;
/// Oracle column budget, `prod(n_i + 1)`.
pub const DEFAULT_COLUMN_BUDGET: u128 = 4096;

const MIN_PRIME: u64 = 1 << 16;
const MAX_PRIME: u64 = 1 << 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldConfig {
    pub prime: u64,
    pub seed: u64,
    pub retries: u32,
    pub secondary_prime: u64,
    pub column_budget: u128,
    pub force: bool,
}

impl Default for FieldConfig {
    fn default() -> Self {
        Self {
            prime: DEFAULT_PRIME,
            seed: DEFAULT_SEED,
            retries: DEFAULT_RETRIES,
            secondary_prime: SECONDARY_PRIME,
            column_budget: DEFAULT_COLUMN_BUDGET,
            force: false,
        }
    }
}

impl FieldConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), OracleError> {
        check_prime(self.prime)?;
        check_prime(self.secondary_prime)
    }
}

pub fn check_prime(p: u64) -> Result<(), OracleError> {
    if !(MIN_PRIME < p && p < MAX_PRIME) {
        return Err(OracleError::PrimeOutOfRange(p));
    }
    if !is_prime(p) {
        return Err(OracleError::NotPrime(p));
    }
    Ok(())
}

/// Trial division; `p < 2^32` keeps this under 2^16 steps.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p.is_multiple_of(2) {
        return p == 2;
    }
    let mut d = 3;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    a * b % p
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse of a non-zero residue via Fermat.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

/// SplitMix64 step; used to derive per-attempt seeds from the user seed.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
