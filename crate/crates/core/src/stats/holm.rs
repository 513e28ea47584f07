use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolmAdjusted {
    pub p_adjusted: f64,
    pub reject: bool,
}

/// Holm step-down adjustment of one family, in input order.
pub fn holm_adjust(p: &[f64]) -> Vec<f64> {
    let m = p.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p[a].total_cmp(&p[b]).then(a.cmp(&b)));
    let mut out = vec![0.0; m];
    let mut running = 0.0f64;
    for (j, &i) in order.iter().enumerate() {
        let scaled = ((m - j) as f64 * p[i]).min(1.0);
        running = running.max(scaled);
        out[i] = running;
    }
    out
}

/// Holm–Bonferroni applied separately within each context. Keys are
/// `(context, hypothesis)`; every context is its own family.
pub fn holm<C, H>(p_by_key: &BTreeMap<(C, H), f64>, alpha: f64) -> BTreeMap<(C, H), HolmAdjusted>
where
    C: Ord + Clone,
    H: Ord + Clone,
{
    type Members<'a, C, H> = Vec<(&'a (C, H), f64)>;
    let mut families: BTreeMap<&C, Members<C, H>> = BTreeMap::new();
    for (key, &p) in p_by_key {
        families.entry(&key.0).or_default().push((key, p));
    }
    let mut out = BTreeMap::new();
    for members in families.values() {
        let ps: Vec<f64> = members.iter().map(|m| m.1).collect();
        for ((key, _), adj) in members.iter().zip(holm_adjust(&ps)) {
            out.insert(
                (*key).clone(),
                HolmAdjusted {
                    p_adjusted: adj,
                    reject: adj <= alpha,
                },
            );
        }
    }
    out
}
