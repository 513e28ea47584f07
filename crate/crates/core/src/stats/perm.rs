use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::StatsError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PermutationResult {
    pub mean_deviation: f64,
    pub p_value: f64,
    pub n_perms: usize,
}

/// Two-tailed sign-flip permutation test of a zero mean deviation.
///
/// Each permutation flips the sign of every deviation independently with
/// probability 1/2; `p = (#{|Σ d_π| ≥ |Σ d|} + 1) / (n_perms + 1)`. Sign bits
/// come from one ChaCha8 stream seeded with `seed`.
pub fn signflip_perm(deviations: &[f64], n_perms: usize, seed: u64) -> Result<PermutationResult, StatsError> {
    let n = deviations.len();
    if n < 3 {
        return Err(StatsError::TooFewQueries { needed: 3, got: n });
    }
    if n_perms == 0 {
        return Err(StatsError::InvalidArgument("n_perms must be positive".into()));
    }
    if deviations.iter().any(|d| !d.is_finite()) {
        return Err(StatsError::InvalidArgument("deviations must be finite".into()));
    }
    let observed: f64 = deviations.iter().sum();
    let scale: f64 = deviations.iter().map(|d| d.abs()).sum();
    // Ties in exact arithmetic must count as extreme despite rounding noise.
    let threshold = observed.abs() - 1e-12 * scale;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut extreme = 0usize;
    for _ in 0..n_perms {
        let mut sum = 0.0;
        for chunk in deviations.chunks(64) {
            let bits = rng.next_u64();
            for (i, d) in chunk.iter().enumerate() {
                if bits >> i & 1 == 1 {
                    sum -= d;
                } else {
                    sum += d;
                }
            }
        }
        if sum.abs() >= threshold {
            extreme += 1;
        }
    }
    Ok(PermutationResult {
        mean_deviation: observed / n as f64,
        p_value: (extreme + 1) as f64 / (n_perms + 1) as f64,
        n_perms,
    })
}
