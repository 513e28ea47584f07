use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::{Category, Mention, Scheme};

use super::StatsError;

// Linear interpolation between order statistics (Hyndman–Fan type 7).
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Percentile bootstrap interval for each category's share of mentions, in
/// percent. Mentions are resampled with replacement.
pub fn bootstrap_ci(
    mentions: &[Mention],
    scheme: Scheme,
    n_resamples: usize,
    level: f64,
    seed: u64,
) -> Result<BTreeMap<Category, (f64, f64)>, StatsError> {
    if mentions.is_empty() {
        return Err(StatsError::EmptyMentions);
    }
    if n_resamples == 0 || !(level > 0.0 && level < 1.0) {
        return Err(StatsError::InvalidArgument(format!(
            "n_resamples={n_resamples}, level={level}"
        )));
    }
    if let Some(m) = mentions.iter().find(|m| !scheme.contains(m.category)) {
        return Err(StatsError::SchemeMismatch(m.category));
    }
    let cats = scheme.categories();
    let idx: Vec<usize> = mentions
        .iter()
        .map(|m| cats.iter().position(|c| *c == m.category).unwrap_or(0))
        .collect();
    let n = idx.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shares: Vec<Vec<f64>> = vec![Vec::with_capacity(n_resamples); cats.len()];
    let mut counts = vec![0usize; cats.len()];
    for _ in 0..n_resamples {
        counts.iter_mut().for_each(|c| *c = 0);
        for _ in 0..n {
            counts[idx[rng.gen_range(0..n)]] += 1;
        }
        for (s, &c) in shares.iter_mut().zip(&counts) {
            s.push(c as f64 / n as f64 * 100.0);
        }
    }
    let tail = (1.0 - level) / 2.0;
    Ok(cats
        .iter()
        .zip(shares)
        .map(|(c, mut s)| {
            s.sort_by(f64::total_cmp);
            (*c, (quantile(&s, tail), quantile(&s, 1.0 - tail)))
        })
        .collect())
}
