use std::collections::BTreeMap;

use crate::model::{Category, Scheme};

use super::special::normal_two_tailed;
use super::StatsError;

/// Percentage of mentions per category. Every category of `scheme` appears
/// in the output, with zero where it has no mentions.
pub fn proportions(counts: &BTreeMap<Category, u64>, scheme: Scheme) -> Result<BTreeMap<Category, f64>, StatsError> {
    if let Some(c) = counts.keys().find(|c| !scheme.contains(**c)) {
        return Err(StatsError::SchemeMismatch(*c));
    }
    let total: u64 = counts.values().sum();
    if total == 0 {
        return Err(StatsError::EmptyCounts);
    }
    Ok(scheme
        .categories()
        .iter()
        .map(|c| {
            let m = counts.get(c).copied().unwrap_or(0);
            (*c, m as f64 / total as f64 * 100.0)
        })
        .collect())
}

/// Observed percentage minus expected percentage, per category.
pub fn diff_vs_benchmark(
    observed_pct: &BTreeMap<Category, f64>,
    expected: &BTreeMap<Category, f64>,
    scheme: Scheme,
) -> Result<BTreeMap<Category, f64>, StatsError> {
    if let Some(c) = observed_pct
        .keys()
        .chain(expected.keys())
        .find(|c| !scheme.contains(**c))
    {
        return Err(StatsError::SchemeMismatch(*c));
    }
    scheme
        .categories()
        .iter()
        .map(|c| {
            let e = expected.get(c).ok_or(StatsError::MissingBenchmarkCategory(*c))?;
            let p = observed_pct.get(c).copied().unwrap_or(0.0);
            Ok((*c, p - 100.0 * e))
        })
        .collect()
}

/// One-sample binomial proportion z-test; returns `(z, two-tailed p)`.
pub fn binom_z(k: u64, n: u64, p0: f64) -> Result<(f64, f64), StatsError> {
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(StatsError::DegenerateP0(p0));
    }
    if n == 0 || k > n {
        return Err(StatsError::BadCounts { k, n });
    }
    // (k − n·p0) / sqrt(n·p0·(1−p0)) is algebraically (k/n − p0)/sqrt(p0(1−p0)/n)
    // with fewer rounding steps.
    let n_f = n as f64;
    let z = (k as f64 - n_f * p0) / (n_f * p0 * (1.0 - p0)).sqrt();
    Ok((z, normal_two_tailed(z)))
}
