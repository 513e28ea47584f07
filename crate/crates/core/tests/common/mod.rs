#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Binomial, Distribution};
use statrs::function::beta::ln_beta;
use statrs::function::factorial::ln_binomial;

/// Beta-Binomial draws with `n_i` uniform on `n_range`.
pub fn beta_binomial_sample(seed: u64, n_q: usize, n_range: (u64, u64), mu: f64, m: f64) -> Vec<(u64, u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let beta = Beta::new(mu * m, (1.0 - mu) * m).unwrap();
    (0..n_q)
        .map(|_| {
            let n = rng.gen_range(n_range.0..=n_range.1);
            let p = beta.sample(&mut rng);
            let k = Binomial::new(n, p).unwrap().sample(&mut rng);
            (k, n)
        })
        .collect()
}

pub fn binomial_sample(seed: u64, n_q: usize, n: u64, p: f64) -> Vec<(u64, u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = Binomial::new(n, p).unwrap();
    (0..n_q).map(|_| (b.sample(&mut rng), n)).collect()
}

/// Log-likelihood via the Beta function, independent of the library's
/// regrouped sums.
pub fn bb_loglik(obs: &[(u64, u64)], u: f64, v: f64) -> f64 {
    let m = v.exp();
    let mu = 1.0 / (1.0 + (-u).exp());
    let (a, b) = (m * mu, m * (1.0 - mu));
    let lb = ln_beta(a, b);
    obs.iter()
        .map(|&(k, n)| ln_binomial(n, k) + ln_beta(k as f64 + a, (n - k) as f64 + b) - lb)
        .sum()
}

fn axis(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|i| (lo + i as f64 * step).min(hi)).collect()
}

/// Grid search over a box, refined around the best few cells down to a
/// step of 1e-5. With `u_fixed` set, searches `v` only.
pub fn grid_oracle(obs: &[(u64, u64)], u_box: (f64, f64), v_box: (f64, f64), u_fixed: Option<f64>) -> f64 {
    let coarse = 0.05;
    let us = match u_fixed {
        Some(u) => vec![u],
        None => axis(u_box.0, u_box.1, coarse),
    };
    let vs = axis(v_box.0, v_box.1, coarse);
    let mut cells: Vec<(f64, f64, f64)> = Vec::with_capacity(us.len() * vs.len());
    for &u in &us {
        for &v in &vs {
            cells.push((bb_loglik(obs, u, v), u, v));
        }
    }
    cells.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = f64::NEG_INFINITY;
    for &(_, u0, v0) in cells.iter().take(4) {
        let (mut u, mut v, mut step) = (u0, v0, coarse);
        let mut val = f64::NEG_INFINITY;
        while step > 1e-5 {
            let half = 2.0 * step;
            step /= 10.0;
            let ur = match u_fixed {
                Some(f) => vec![f],
                None => axis((u - half).max(u_box.0), (u + half).min(u_box.1), step),
            };
            let vr = axis((v - half).max(v_box.0), (v + half).min(v_box.1), step);
            for &uu in &ur {
                for &vv in &vr {
                    let l = bb_loglik(obs, uu, vv);
                    if l > val {
                        (val, u, v) = (l, uu, vv);
                    }
                }
            }
        }
        best = best.max(val);
    }
    best
}
