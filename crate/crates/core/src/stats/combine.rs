use std::collections::BTreeMap;

use crate::model::{Category, Scheme, TestKind};

use super::adaptive::StratumResult;
use super::special::{chi2_sf, normal_two_tailed};
use super::StatsError;

/// Stouffer combination of per-stratum z-scores weighted by `sqrt(N)`;
/// returns `(Z, two-tailed p)`. Descriptive strata are skipped.
pub fn stouffer(strata: &[StratumResult]) -> Result<(f64, f64), StatsError> {
    let mut num = 0.0;
    let mut den = 0.0;
    for s in strata
        .iter()
        .filter(|s| s.test_kind != TestKind::Descriptive && s.n > 0)
    {
        let w = (s.n as f64).sqrt();
        num += w * s.z_equivalent;
        den += s.n as f64;
    }
    if den == 0.0 {
        return Err(StatsError::NoTestableStrata);
    }
    let z = num / den.sqrt();
    Ok((z, normal_two_tailed(z)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Omnibus {
    pub chi2: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Sum of squared per-category z-scores referred to χ²(K−1).
pub fn omnibus(z_by_category: &BTreeMap<Category, f64>, scheme: Scheme) -> Result<Omnibus, StatsError> {
    if let Some(c) = z_by_category.keys().find(|c| !scheme.contains(**c)) {
        return Err(StatsError::SchemeMismatch(*c));
    }
    let mut chi2 = 0.0;
    for c in scheme.categories() {
        let z = z_by_category.get(c).ok_or(StatsError::MissingCategory(*c))?;
        chi2 += z * z;
    }
    let df = scheme.k() - 1;
    Ok(Omnibus {
        chi2,
        df,
        p_value: chi2_sf(chi2, df as f64),
    })
}
