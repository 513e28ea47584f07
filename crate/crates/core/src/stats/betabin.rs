//! Beta-Binomial likelihood-ratio test for a mean proportion under
//! query-to-query overdispersion.
//!
//! Each query contributes `k_i ~ BetaBinomial(n_i, α, β)` with mean
//! `μ = α/(α+β)` and dispersion `M = α+β`. Under H1 both are free; under H0
//! `μ = p0` and only `M` is fitted. Optimization runs on `(logit μ, log M)`
//! inside a box, using projected Newton steps with analytic derivatives from
//! several fixed starts and a coarse-grid fallback.
//!
//! For integer counts the log-likelihood needs no gamma functions:
//!
//! ```text
//! ℓ = Σ_i [ ln C(n_i,k_i) + Σ_{j<k_i} ln(α+j) + Σ_{j<n_i−k_i} ln(β+j) − Σ_{j<n_i} ln(M+j) ]
//! ```
//!
//! and each inner sum is regrouped by `j`, so one evaluation costs
//! `O(max n_i)` regardless of the number of queries.

use super::special::{chi2_sf, ln_gamma};
use super::StatsError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaBinomialOptions {
    /// Box for `logit μ` under H1. Widened as needed to contain `logit p0`.
    pub logit_mu_bounds: (f64, f64),
    /// Box for `log M`. The upper end acts as the binomial-limit cap.
    pub log_m_bounds: (f64, f64),
    /// Convergence tolerance on the log-likelihood.
    pub tol: f64,
    pub max_iter: usize,
    /// Minimum number of queries with `n_i ≥ 1`.
    pub min_queries: usize,
}

impl Default for BetaBinomialOptions {
    fn default() -> Self {
        BetaBinomialOptions {
            logit_mu_bounds: (-6.0, 6.0),
            log_m_bounds: (-4.0, 16.0),
            tol: 1e-8,
            max_iter: 200,
            min_queries: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BetaBinomialLrt {
    pub mu_hat: f64,
    pub m_hat: f64,
    /// Dispersion fitted under H0.
    pub m0_hat: f64,
    pub loglik_h1: f64,
    pub loglik_h0: f64,
    /// `2(ℓ_H1 − ℓ_H0)`, clamped at zero.
    pub lambda: f64,
    /// `sign(μ̂ − p0)·sqrt(Λ)`.
    pub z_equivalent: f64,
    pub p_value: f64,
    pub n_used: usize,
    /// Observations with `n_i = 0`, which carry no likelihood.
    pub n_dropped: usize,
}

/// Sufficient statistics for the regrouped log-likelihood.
#[derive(Debug, Clone)]
pub struct BetaBinomialData {
    // count_a[j] = #{i : k_i > j}, count_b[j] = #{i : n_i − k_i > j},
    // count_m[j] = #{i : n_i > j}
    count_a: Vec<f64>,
    count_b: Vec<f64>,
    count_m: Vec<f64>,
    log_binom: f64,
    pooled_k: u64,
    pooled_n: u64,
}

fn ln_choose(n: u64, k: u64) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

impl BetaBinomialData {
    /// Builds from `(k, n)` pairs with `n ≥ 1` and `k ≤ n`.
    pub fn new(obs: &[(u64, u64)]) -> Self {
        let max_n = obs.iter().map(|&(_, n)| n).max().unwrap_or(0) as usize;
        let mut count_a = vec![0.0; max_n];
        let mut count_b = vec![0.0; max_n];
        let mut count_m = vec![0.0; max_n];
        let mut log_binom = 0.0;
        for &(k, n) in obs {
            for c in &mut count_a[..k as usize] {
                *c += 1.0;
            }
            for c in &mut count_b[..(n - k) as usize] {
                *c += 1.0;
            }
            for c in &mut count_m[..n as usize] {
                *c += 1.0;
            }
            log_binom += ln_choose(n, k);
        }
        BetaBinomialData {
            count_a,
            count_b,
            count_m,
            log_binom,
            pooled_k: obs.iter().map(|o| o.0).sum(),
            pooled_n: obs.iter().map(|o| o.1).sum(),
        }
    }

    /// Log-likelihood at `(u, v) = (logit μ, log M)`.
    pub fn loglik(&self, u: f64, v: f64) -> f64 {
        let m = v.exp();
        let mu = sigmoid(u);
        let (alpha, beta) = (m * mu, m * (1.0 - mu));
        let mut l = self.log_binom;
        for (j, ((&ca, &cb), &cm)) in self.count_a.iter().zip(&self.count_b).zip(&self.count_m).enumerate() {
            let j = j as f64;
            if ca > 0.0 {
                l += ca * (alpha + j).ln();
            }
            if cb > 0.0 {
                l += cb * (beta + j).ln();
            }
            l -= cm * (m + j).ln();
        }
        l
    }

    /// Log-likelihood, gradient and Hessian in `(u, v)`.
    fn derivatives(&self, u: f64, v: f64) -> (f64, [f64; 2], [[f64; 2]; 2]) {
        let m = v.exp();
        let mu = sigmoid(u);
        let (alpha, beta) = (m * mu, m * (1.0 - mu));
        let (mut a1, mut a2, mut b1, mut b2, mut c1, mut c2) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        let mut l = self.log_binom;
        for (j, ((&ca, &cb), &cm)) in self.count_a.iter().zip(&self.count_b).zip(&self.count_m).enumerate() {
            let j = j as f64;
            if ca > 0.0 {
                let x = alpha + j;
                l += ca * x.ln();
                a1 += ca / x;
                a2 -= ca / (x * x);
            }
            if cb > 0.0 {
                let x = beta + j;
                l += cb * x.ln();
                b1 += cb / x;
                b2 -= cb / (x * x);
            }
            let x = m + j;
            l -= cm * x.ln();
            c1 += cm / x;
            c2 += cm / (x * x);
        }
        let s1 = mu * (1.0 - mu);
        let s2 = s1 * (1.0 - 2.0 * mu);
        let g_u = m * s1 * (a1 - b1);
        let g_v = alpha * a1 + beta * b1 - m * c1;
        let h_uu = (m * s1).powi(2) * (a2 + b2) + m * s2 * (a1 - b1);
        let h_vv = alpha * alpha * a2 + beta * beta * b2 + alpha * a1 + beta * b1 - m * c1 + m * m * c2;
        let h_uv = m * s1 * (a1 - b1) + m * s1 * (alpha * a2 - beta * b2);
        (l, [g_u, g_v], [[h_uu, h_uv], [h_uv, h_vv]])
    }

    pub fn pooled_proportion(&self) -> f64 {
        self.pooled_k as f64 / self.pooled_n as f64
    }
}

fn sigmoid(u: f64) -> f64 {
    1.0 / (1.0 + (-u).exp())
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

#[derive(Debug, Clone, Copy)]
struct Fit {
    x: [f64; 2],
    loglik: f64,
    converged: bool,
}

/// Projected Newton ascent in a box. `free[i] == false` pins coordinate `i`.
fn newton_box(
    data: &BetaBinomialData,
    start: [f64; 2],
    lo: [f64; 2],
    hi: [f64; 2],
    free: [bool; 2],
    opts: &BetaBinomialOptions,
) -> Fit {
    let clamp = |x: [f64; 2]| [x[0].clamp(lo[0], hi[0]), x[1].clamp(lo[1], hi[1])];
    let mut x = clamp(start);
    let (mut f, mut g, mut h) = data.derivatives(x[0], x[1]);
    if !f.is_finite() {
        return Fit {
            x,
            loglik: f,
            converged: false,
        };
    }
    for _ in 0..opts.max_iter {
        // Active set: pinned coordinates and bounds the gradient pushes against.
        let mut act = [false; 2];
        for i in 0..2 {
            let at_lo = x[i] <= lo[i] + 1e-12 && g[i] <= 0.0;
            let at_hi = x[i] >= hi[i] - 1e-12 && g[i] >= 0.0;
            act[i] = !free[i] || at_lo || at_hi;
        }
        let pg: f64 = (0..2).filter(|&i| !act[i]).map(|i| g[i].abs()).fold(0.0, f64::max);
        if pg < 1e-9 {
            return Fit {
                x,
                loglik: f,
                converged: true,
            };
        }
        let mut d = [0.0; 2];
        let newton_ok = match (act[0], act[1]) {
            (false, false) => {
                let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
                if h[0][0] < 0.0 && det > 0.0 {
                    d[0] = -(h[1][1] * g[0] - h[0][1] * g[1]) / det;
                    d[1] = -(-h[1][0] * g[0] + h[0][0] * g[1]) / det;
                    true
                } else {
                    false
                }
            }
            (true, false) if h[1][1] < 0.0 => {
                d[1] = -g[1] / h[1][1];
                true
            }
            (false, true) if h[0][0] < 0.0 => {
                d[0] = -g[0] / h[0][0];
                true
            }
            _ => false,
        };
        if !newton_ok {
            for i in 0..2 {
                if !act[i] {
                    d[i] = g[i] / g[i].abs().max(1.0);
                }
            }
        }
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let xn = clamp([x[0] + t * d[0], x[1] + t * d[1]]);
            let fn_ = data.loglik(xn[0], xn[1]);
            let gain = g[0] * (xn[0] - x[0]) + g[1] * (xn[1] - x[1]);
            if fn_.is_finite() && fn_ >= f + 1e-4 * gain.min(0.0).abs().max(0.0) && fn_ >= f {
                accepted = Some((xn, fn_));
                break;
            }
            t *= 0.5;
        }
        let Some((xn, fn_)) = accepted else {
            // No ascent possible from here: stationary to working precision.
            return Fit {
                x,
                loglik: f,
                converged: pg < 1e-5,
            };
        };
        let step = (xn[0] - x[0]).abs().max((xn[1] - x[1]).abs());
        let df = fn_ - f;
        x = xn;
        (f, g, h) = data.derivatives(x[0], x[1]);
        if df < opts.tol && step < 1e-7 {
            return Fit {
                x,
                loglik: f,
                converged: true,
            };
        }
    }
    Fit {
        x,
        loglik: f,
        converged: false,
    }
}

fn best_fit(
    data: &BetaBinomialData,
    starts: &[[f64; 2]],
    lo: [f64; 2],
    hi: [f64; 2],
    free: [bool; 2],
    opts: &BetaBinomialOptions,
) -> Result<Fit, StatsError> {
    let pick = |fits: &[Fit]| {
        fits.iter()
            .filter(|f| f.converged && f.loglik.is_finite())
            .copied()
            .max_by(|a, b| a.loglik.total_cmp(&b.loglik))
    };
    let fits: Vec<Fit> = starts
        .iter()
        .map(|&s| newton_box(data, s, lo, hi, free, opts))
        .collect();
    let mut best = pick(&fits);

    // Coarse-grid fallback, also used as a guard against a local optimum.
    const GRID: usize = 25;
    let axis = |i: usize, t: usize| {
        if free[i] {
            lo[i] + (hi[i] - lo[i]) * t as f64 / (GRID - 1) as f64
        } else {
            lo[i]
        }
    };
    let mut grid_best = ([lo[0], lo[1]], f64::NEG_INFINITY);
    for a in 0..if free[0] { GRID } else { 1 } {
        for b in 0..if free[1] { GRID } else { 1 } {
            let x = [axis(0, a), axis(1, b)];
            let l = data.loglik(x[0], x[1]);
            if l > grid_best.1 {
                grid_best = (x, l);
            }
        }
    }
    if best.is_none_or(|b| grid_best.1 > b.loglik + opts.tol) {
        let refined = newton_box(data, grid_best.0, lo, hi, free, opts);
        best = pick(&[best, Some(refined)].into_iter().flatten().collect::<Vec<_>>());
    }
    best.ok_or(StatsError::OptimizerNoConverge)
}

/// Fits H1 (free mean and dispersion) and returns `(μ̂, M̂, ℓ)`.
pub fn fit_h1(
    data: &BetaBinomialData,
    opts: &BetaBinomialOptions,
    extra_start: Option<[f64; 2]>,
) -> Result<(f64, f64, f64), StatsError> {
    let (ulo, uhi) = opts.logit_mu_bounds;
    let (vlo, vhi) = opts.log_m_bounds;
    let pooled = data.pooled_proportion().clamp(1e-6, 1.0 - 1e-6);
    let u_hat = logit(pooled).clamp(ulo, uhi);
    let mid_v = 0.5 * (vlo + vhi);
    let mut starts = vec![
        [u_hat, mid_v],
        [u_hat, vlo + 0.25 * (vhi - vlo)],
        [u_hat, vlo + 0.75 * (vhi - vlo)],
        [0.0, mid_v],
        [u_hat, vhi],
    ];
    starts.extend(extra_start);
    let fit = best_fit(data, &starts, [ulo, vlo], [uhi, vhi], [true, true], opts)?;
    Ok((sigmoid(fit.x[0]), fit.x[1].exp(), fit.loglik))
}

/// Fits H0 (mean fixed at `p0`) and returns `(log M̂, ℓ)`.
pub fn fit_h0(data: &BetaBinomialData, p0: f64, opts: &BetaBinomialOptions) -> Result<(f64, f64), StatsError> {
    let (vlo, vhi) = opts.log_m_bounds;
    let u0 = logit(p0);
    let starts: Vec<[f64; 2]> = (0..5).map(|i| [u0, vlo + (vhi - vlo) * i as f64 / 4.0]).collect();
    let fit = best_fit(data, &starts, [u0, vlo], [u0, vhi], [false, true], opts)?;
    Ok((fit.x[1], fit.loglik))
}

/// Likelihood-ratio test of `μ = p0` with default options.
pub fn betabin_lrt(obs: &[(u64, u64)], p0: f64) -> Result<BetaBinomialLrt, StatsError> {
    betabin_lrt_with(obs, p0, &BetaBinomialOptions::default())
}

/// Likelihood-ratio test of `μ = p0`. Observations with `n_i = 0` are dropped
/// and counted in `n_dropped`.
pub fn betabin_lrt_with(
    obs: &[(u64, u64)],
    p0: f64,
    opts: &BetaBinomialOptions,
) -> Result<BetaBinomialLrt, StatsError> {
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(StatsError::DegenerateP0(p0));
    }
    if let Some(&(k, n)) = obs.iter().find(|&&(k, n)| k > n) {
        return Err(StatsError::BadCounts { k, n });
    }
    let used: Vec<(u64, u64)> = obs.iter().copied().filter(|&(_, n)| n > 0).collect();
    if used.len() < opts.min_queries {
        return Err(StatsError::TooFewQueries {
            needed: opts.min_queries,
            got: used.len(),
        });
    }
    let data = BetaBinomialData::new(&used);
    let u0 = logit(p0);
    let mut opts = *opts;
    opts.logit_mu_bounds = (opts.logit_mu_bounds.0.min(u0), opts.logit_mu_bounds.1.max(u0));

    let (v0, l0) = fit_h0(&data, p0, &opts)?;
    // Starting H1 from the H0 optimum guarantees ℓ_H1 ≥ ℓ_H0.
    let (mu_hat, m_hat, l1) = fit_h1(&data, &opts, Some([u0, v0]))?;
    let lambda = (2.0 * (l1 - l0)).max(0.0);
    let sign = if mu_hat > p0 {
        1.0
    } else if mu_hat < p0 {
        -1.0
    } else {
        0.0
    };
    Ok(BetaBinomialLrt {
        mu_hat,
        m_hat,
        m0_hat: v0.exp(),
        loglik_h1: l1,
        loglik_h0: l0,
        lambda,
        z_equivalent: sign * lambda.sqrt(),
        p_value: chi2_sf(lambda, 1.0),
        n_used: used.len(),
        n_dropped: obs.len() - used.len(),
    })
}
