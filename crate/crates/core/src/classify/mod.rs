//! Secant profiles, typical ranks, defect scans, tensor-power bounds and
//! perfection checks, built on the oracle and the induction engine.

mod defects;
mod perfect;
mod power;
mod profile;
mod scan;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ffrank::FieldConfig;
use crate::induction::SearchBudget;

pub use defects::{DefectCatalog, Family, FamilyMatch};
pub use perfect::{perfect_check, PerfectReport, Perfection};
pub use power::{tensor_power_bounds, PowerBounds, FILL_ORACLE_CASES, NONDEFECTIVE_ORACLE_CASES};
pub use profile::{
    catalog_typical_rank, resolve_secant, secant_profile, typical_rank, RankStatus, SecantProfile,
    SecantRow, Status, TypicalRank,
};
pub use scan::{defective_scan, format_grid, scan_rows};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("tensor powers need k >= 3, got {0}")]
    TooFewFactors(u32),
    #[error("tensor powers need n >= 1")]
    ZeroPower,
    #[error("(n+1)^k overflows for n = {n}, k = {k}")]
    Overflow { n: u32, k: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyConfig {
    pub field: FieldConfig,
    pub budget: SearchBudget,
    /// Try the induction engine before the oracle.
    pub induction: bool,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            field: FieldConfig::default(),
            budget: SearchBudget {
                max_nodes: 2_000,
                ..SearchBudget::default()
            },
            induction: true,
        }
    }
}
