//! The statistical battery: salience proportions and deviations, the
//! aggregated binomial z-test, the per-query Beta-Binomial likelihood-ratio
//! and sign-flip permutation tests, Stouffer and omnibus aggregation,
//! Holm–Bonferroni adjustment and bootstrap intervals.
//!
//! All randomness comes from ChaCha8 streams seeded with a caller-supplied
//! 64-bit seed, so results are identical across platforms.

mod adaptive;
mod basic;
pub mod betabin;
mod bootstrap;
mod combine;
mod holm;
mod perm;
pub mod special;

use thiserror::Error;

use crate::model::Category;

pub use adaptive::{adaptive_test, adaptive_test_with, AdaptiveOptions, QueryObservation, StratumResult};
pub use basic::{binom_z, diff_vs_benchmark, proportions};
pub use betabin::{betabin_lrt, betabin_lrt_with, BetaBinomialLrt, BetaBinomialOptions};
pub use bootstrap::bootstrap_ci;
pub use combine::{omnibus, stouffer, Omnibus};
pub use holm::{holm, holm_adjust, HolmAdjusted};
pub use perm::{signflip_perm, PermutationResult};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("all category counts are zero")]
    EmptyCounts,
    #[error("category {0} does not belong to the scheme under test")]
    SchemeMismatch(Category),
    #[error("benchmark row lacks category {0}")]
    MissingBenchmarkCategory(Category),
    #[error("null proportion {0} must lie strictly between 0 and 1")]
    DegenerateP0(f64),
    #[error("sample is empty or inconsistent (k={k}, n={n})")]
    BadCounts { k: u64, n: u64 },
    #[error("test needs at least {needed} queries, got {got}")]
    TooFewQueries { needed: usize, got: usize },
    #[error("Beta-Binomial optimizer did not converge")]
    OptimizerNoConverge,
    #[error("no stratum carries an inferential test")]
    NoTestableStrata,
    #[error("omnibus input lacks category {0}")]
    MissingCategory(Category),
    #[error("bootstrap needs at least one mention")]
    EmptyMentions,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
