//! Stratified sampling with equal per-source quotas.

use std::collections::{BTreeMap, HashSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::types::{Passage, Source};
use super::SampleError;
use crate::hash::fnv1a64;

/// Per-source sample sizes.
///
/// Every source starts at `min(total / sources, size)`. The remaining deficit
/// (short sources plus the division remainder) is handed out one passage at a
/// time, round-robin in ascending source-name order, to sources that still have
/// unsampled passages.
pub fn allocate_quotas(sizes: &BTreeMap<Source, usize>, total: usize) -> Result<BTreeMap<Source, usize>, SampleError> {
    let n_sources = sizes.len();
    if n_sources == 0 || total < n_sources {
        return Err(SampleError::TotalTooSmall { total, sources: n_sources });
    }
    let available: usize = sizes.values().sum();
    if available < total {
        return Err(SampleError::InsufficientData { requested: total, available });
    }
    let base = total / n_sources;
    let mut quotas: BTreeMap<Source, usize> = sizes.iter().map(|(s, &n)| (s.clone(), n.min(base))).collect();
    let mut deficit = total - quotas.values().sum::<usize>();
    while deficit > 0 {
        for (src, q) in quotas.iter_mut() {
            if deficit == 0 {
                break;
            }
            if *q < sizes[src] {
                *q += 1;
                deficit -= 1;
            }
        }
    }
    Ok(quotas)
}

/// Draws `total` passages with equal representation across sources.
///
/// Within a source, passages are drawn uniformly without replacement from an
/// RNG seeded by `(seed, source name)`. Output is grouped by source in
/// ascending name order, preserving each source's input order.
pub fn stratified_sample(
    corpora: &BTreeMap<Source, Vec<Passage>>,
    total: usize,
    seed: u64,
) -> Result<Vec<Passage>, SampleError> {
    let mut ids = HashSet::new();
    for p in corpora.values().flatten() {
        if !ids.insert(p.id.as_str()) {
            return Err(SampleError::DuplicateId(p.id.clone()));
        }
    }
    let sizes: BTreeMap<Source, usize> = corpora.iter().map(|(s, v)| (s.clone(), v.len())).collect();
    let quotas = allocate_quotas(&sizes, total)?;

    let mut out = Vec::with_capacity(total);
    for (src, passages) in corpora {
        let quota = quotas[src];
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a64(src.name().as_bytes()));
        let mut picked = rand::seq::index::sample(&mut rng, passages.len(), quota).into_vec();
        picked.sort_unstable();
        out.extend(picked.into_iter().map(|i| passages[i].clone()));
    }
    Ok(out)
}

/// Groups passages by source, keeping input order within each group.
pub fn group_by_source(passages: impl IntoIterator<Item = Passage>) -> BTreeMap<Source, Vec<Passage>> {
    let mut map: BTreeMap<Source, Vec<Passage>> = BTreeMap::new();
    for p in passages {
        map.entry(p.source.clone()).or_default().push(p);
    }
    map
}
