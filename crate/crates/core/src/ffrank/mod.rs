//! Exact rank oracle over a prime field.
//!
//! The span of `s` tangent spaces and `a_i` fibre spaces at random points is
//! written as a dense matrix whose columns are the multi-indices of the ambient
//! tensor space. Its rank mod `p` at any specific points is a lower bound for the
//! generic rank in characteristic zero, so reaching the target dimension proves
//! the statement. Falling short proves nothing.

mod field;
mod matrix;
mod terracini;

use thiserror::Error;

use crate::formats::Statement;

pub use field::{
    check_prime, inv_mod, is_prime, splitmix64, FieldConfig, DEFAULT_COLUMN_BUDGET, DEFAULT_PRIME,
    DEFAULT_RETRIES, DEFAULT_SEED, SECONDARY_PRIME,
};
pub use matrix::{rank_mod_p, rank_mod_p_until, Echelon, Matrix};
pub use terracini::{
    attempt_schedule, build_terracini_matrix, check_budget, sample_points, terracini_oracle,
    terracini_rank, terracini_rows, OracleResult, Point, PointSet, RankWitness, INCONCLUSIVE_NOTE,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {0} must lie strictly between 2^16 and 2^32")]
    PrimeOutOfRange(u64),
    #[error("{cols} columns exceed the oracle budget of {budget} (use --force to override)")]
    BudgetExceeded { cols: u128, budget: u128 },
    #[error("point set does not match the shape of {0}")]
    ShapeMismatch(Statement),
}
