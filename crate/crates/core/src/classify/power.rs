use serde::{Deserialize, Serialize};

use super::ClassifyError;

/// Pairs whose non-defectivity up to `nondefective_max` needed a computer check.
pub const NONDEFECTIVE_ORACLE_CASES: &[(u32, u32)] = &[(4, 4), (7, 4)];
/// Pairs whose fill at `fill_min` needed a computer check.
pub const FILL_ORACLE_CASES: &[(u32, u32)] = &[(1, 5), (1, 6), (1, 7), (2, 4), (3, 4), (3, 5), (4, 4), (7, 4)];

/// Secant bounds for the tensor power `(P^n)^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerBounds {
    pub n: u32,
    pub k: u32,
    /// `floor((n+1)^k / (nk+1))`.
    pub s_k: u128,
    /// `s_k mod (n+1)`.
    pub delta_k: u128,
    /// `sigma_s` has the expected dimension for every `s` up to this.
    pub nondefective_max: u128,
    /// `sigma_s` fills for every `s` from this on.
    pub fill_min: u128,
    pub nondefective_oracle_case: bool,
    pub fill_oracle_case: bool,
}

pub fn tensor_power_bounds(n: u32, k: u32) -> Result<PowerBounds, ClassifyError> {
    if k < 3 {
        return Err(ClassifyError::TooFewFactors(k));
    }
    if n < 1 {
        return Err(ClassifyError::ZeroPower);
    }
    let base = n as u128 + 1;
    let ambient = base
        .checked_pow(k)
        .ok_or(ClassifyError::Overflow { n, k })?;
    let s_k = ambient / (n as u128 * k as u128 + 1);
    let delta_k = s_k % base;
    let nondefective_max = s_k - delta_k;
    Ok(PowerBounds {
        n,
        k,
        s_k,
        delta_k,
        nondefective_max,
        fill_min: nondefective_max + base,
        nondefective_oracle_case: NONDEFECTIVE_ORACLE_CASES.contains(&(n, k)),
        fill_oracle_case: FILL_ORACLE_CASES.contains(&(n, k)),
    })
}
