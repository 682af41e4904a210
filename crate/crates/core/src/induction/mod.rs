//! Induction proofs of non-defectivity: reduction rules, the catalogue of known
//! false statements, the prover and the certificate checker.

pub mod catalog;
pub mod certificate;
pub mod prover;
pub mod rules;
pub mod table;

pub use catalog::{known_false, secant_upper_bound, FalsityReason};
pub use certificate::{verify, CertVerdict, Certificate, ProofNode, Rule, VerifyError, VerifyReport};
pub use prover::{prove, Prover, SearchBudget, SearchStats, Undetermined, Verdict};
pub use rules::{RuleError, SplitChoice, SplitKind};
pub use table::SmallTable;
