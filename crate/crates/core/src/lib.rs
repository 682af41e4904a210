//! Secant varieties of Segre products: statement arithmetic, a finite-field
//! Terracini rank oracle, an inductive splitting prover with checkable
//! certificates, and classification sweeps built on top of them.

pub mod classify;
pub mod ffrank;
pub mod formats;
pub mod induction;

pub use formats::{Abundance, Format, FormatError, Statement};
