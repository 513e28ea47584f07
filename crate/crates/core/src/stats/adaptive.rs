use serde::{Deserialize, Serialize};

use crate::model::TestKind;

use super::betabin::{betabin_lrt_with, BetaBinomialOptions};
use super::perm::signflip_perm;
use super::special::z_from_two_tailed;

/// Category mentions `k` out of `n` total mentions for one query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryObservation {
    pub query_id: String,
    pub stratum: String,
    pub k: u64,
    pub n: u64,
}

impl QueryObservation {
    /// Per-query proportion; zero when the query has no mentions at all.
    pub fn p_q(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.k as f64 / self.n as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratumResult {
    pub stratum: String,
    pub z_equivalent: f64,
    pub p: Option<f64>,
    pub n: usize,
    pub test_kind: TestKind,
    /// Mean of `p_q − p0`.
    pub mean_deviation: f64,
    /// Λ for the likelihood-ratio test, mean deviation otherwise.
    pub statistic: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveOptions {
    pub n_perms: usize,
    /// Smallest N for the Beta-Binomial test.
    pub lrt_min: usize,
    /// Smallest N for any inferential test.
    pub min_queries: usize,
    pub betabin: BetaBinomialOptions,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        AdaptiveOptions {
            n_perms: 9999,
            lrt_min: 30,
            min_queries: 3,
            betabin: BetaBinomialOptions::default(),
        }
    }
}

pub fn adaptive_test(obs: &[QueryObservation], p0: f64, seed: u64) -> StratumResult {
    adaptive_test_with(obs, p0, seed, &AdaptiveOptions::default())
}

/// Picks the per-query test by the number of queries in the stratum: the
/// Beta-Binomial LRT for large strata, the sign-flip permutation test for
/// small ones, and no test below `min_queries`. If the LRT cannot run (too few
/// queries with mentions, degenerate `p0`, or no convergence) the permutation
/// test is used instead.
pub fn adaptive_test_with(obs: &[QueryObservation], p0: f64, seed: u64, opts: &AdaptiveOptions) -> StratumResult {
    let stratum = obs.first().map(|o| o.stratum.clone()).unwrap_or_default();
    let n = obs.len();
    let deviations: Vec<f64> = obs.iter().map(|o| o.p_q() - p0).collect();
    let mean_deviation = if n == 0 {
        0.0
    } else {
        deviations.iter().sum::<f64>() / n as f64
    };
    let descriptive = StratumResult {
        stratum: stratum.clone(),
        z_equivalent: 0.0,
        p: None,
        n,
        test_kind: TestKind::Descriptive,
        mean_deviation,
        statistic: mean_deviation,
    };
    if n < opts.min_queries {
        return descriptive;
    }
    if n >= opts.lrt_min {
        let counts: Vec<(u64, u64)> = obs.iter().map(|o| (o.k, o.n)).collect();
        let bb = BetaBinomialOptions {
            min_queries: opts.lrt_min,
            ..opts.betabin
        };
        if let Ok(r) = betabin_lrt_with(&counts, p0, &bb) {
            return StratumResult {
                stratum,
                z_equivalent: r.z_equivalent,
                p: Some(r.p_value),
                n,
                test_kind: TestKind::BetaBinLRT,
                mean_deviation,
                statistic: r.lambda,
            };
        }
    }
    match signflip_perm(&deviations, opts.n_perms, seed) {
        Ok(r) => {
            let sign = if r.mean_deviation > 0.0 {
                1.0
            } else if r.mean_deviation < 0.0 {
                -1.0
            } else {
                0.0
            };
            StratumResult {
                stratum,
                z_equivalent: sign * z_from_two_tailed(r.p_value),
                p: Some(r.p_value),
                n,
                test_kind: TestKind::SignFlipPerm,
                mean_deviation,
                statistic: r.mean_deviation,
            }
        }
        Err(_) => descriptive,
    }
}
