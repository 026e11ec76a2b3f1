use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub mean_enjoyment: f64,
    /// Fraction of scores equal to the scale maximum.
    pub pct_max: f64,
    pub n: usize,
}

pub fn group_summary(enjoyment: &[u32], max_score: u32) -> Result<GroupSummary> {
    if enjoyment.is_empty() {
        return Err(Error::Empty("enjoyment scores"));
    }
    let n = enjoyment.len();
    let sum: u64 = enjoyment.iter().map(|&e| e as u64).sum();
    let at_max = enjoyment.iter().filter(|&&e| e == max_score).count();
    Ok(GroupSummary {
        mean_enjoyment: sum as f64 / n as f64,
        pct_max: at_max as f64 / n as f64,
        n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossTabRow<K> {
    pub key: K,
    pub n: usize,
    pub counts: BTreeMap<String, usize>,
    pub shares: BTreeMap<String, f64>,
    /// Set when `n` is below the requested floor.
    pub sparse: bool,
}

/// Outcome counts and shares per key. Rows with a missing or empty outcome
/// are dropped with a warning. Every row lists every outcome seen anywhere.
pub fn crosstab<K: Ord + Clone>(rows: &[(K, Option<String>)], min_n: usize) -> Vec<CrossTabRow<K>> {
    let mut dropped = 0usize;
    let mut grouped: BTreeMap<K, BTreeMap<String, usize>> = BTreeMap::new();
    let mut outcomes = BTreeSet::new();
    for (key, outcome) in rows {
        match outcome.as_deref().map(str::trim) {
            Some(o) if !o.is_empty() => {
                outcomes.insert(o.to_string());
                *grouped
                    .entry(key.clone())
                    .or_default()
                    .entry(o.to_string())
                    .or_default() += 1;
            }
            _ => dropped += 1,
        }
    }
    if dropped > 0 {
        log::warn!("crosstab: excluded {dropped} rows without an outcome");
    }
    grouped
        .into_iter()
        .map(|(key, counts)| {
            let n: usize = counts.values().sum();
            let counts: BTreeMap<String, usize> = outcomes
                .iter()
                .map(|o| (o.clone(), counts.get(o).copied().unwrap_or(0)))
                .collect();
            let shares = counts
                .iter()
                .map(|(o, &c)| (o.clone(), c as f64 / n as f64))
                .collect();
            CrossTabRow {
                key,
                n,
                counts,
                shares,
                sparse: n < min_n,
            }
        })
        .collect()
}
