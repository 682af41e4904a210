//! `segre`: secant dimensions, induction proofs and scans from the command line.

mod cache;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use segre_core::ffrank::{DEFAULT_COLUMN_BUDGET, DEFAULT_PRIME, DEFAULT_RETRIES, DEFAULT_SEED};

#[derive(Parser, Debug)]
#[command(name = "segre", version, about = "Secant dimensions and induction proofs for Segre products")]
pub struct Cli {
    #[command(flatten)]
    pub run: RunArgs,
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Prime for the rank oracle.
    #[arg(long, global = true, default_value_t = DEFAULT_PRIME)]
    pub prime: u64,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Reseeded attempts with the main prime before the secondary prime.
    #[arg(long, global = true, default_value_t = DEFAULT_RETRIES)]
    pub retries: u32,
    /// Search nodes per proof.
    #[arg(long, global = true, default_value_t = 50_000)]
    pub budget_nodes: usize,
    /// Largest ambient dimension handed to the oracle.
    #[arg(long, global = true, default_value_t = DEFAULT_COLUMN_BUDGET as u64)]
    pub budget_cols: u64,
    /// JSONL result cache.
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    /// Run the oracle past the column budget.
    #[arg(long, global = true)]
    pub force: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Expected and certified dimension of sigma_s.
    Dim { format: String, s: u32 },
    /// Search for an induction proof and write its certificate.
    Prove {
        statement: String,
        /// Where to write the cert-v1 JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Secant profile, typical rank and perfection of a format.
    Classify { format: String },
    /// Defect scan over a grid of formats.
    Scan {
        /// Scan exactly this many factors.
        #[arg(long)]
        k: Option<usize>,
        /// Scan 3..=k-max factors when --k is absent.
        #[arg(long, default_value_t = 3)]
        k_max: usize,
        #[arg(long, default_value_t = 3)]
        max_n: u32,
        #[arg(long, default_value_t = 6)]
        max_r: u32,
    },
    /// Check a certificate.
    Verify {
        path: PathBuf,
        /// Recompute every oracle leaf from its recorded prime and seed.
        #[arg(long)]
        recheck_oracle: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => code.into(),
        Err(e) => {
            eprintln!("error: {e:#}");
            commands::Exit::Usage.into()
        }
    }
}
