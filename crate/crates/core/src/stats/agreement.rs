use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Cohen's kappa between two raters' labels for the same items.
///
/// When chance agreement is 1 (both raters used a single, identical label)
/// kappa is defined as 1.
pub fn cohens_kappa<T: Ord>(labels_a: &[T], labels_b: &[T]) -> Result<f64> {
    if labels_a.len() != labels_b.len() {
        return Err(Error::InvalidInput(format!(
            "label lists differ in length: {} vs {}",
            labels_a.len(),
            labels_b.len()
        )));
    }
    if labels_a.is_empty() {
        return Err(Error::Empty("kappa labels"));
    }
    let n = labels_a.len() as f64;
    let agree = labels_a.iter().zip(labels_b).filter(|(a, b)| a == b).count() as f64;
    let p_o = agree / n;

    let mut marginals: BTreeMap<&T, (usize, usize)> = BTreeMap::new();
    for a in labels_a {
        marginals.entry(a).or_default().0 += 1;
    }
    for b in labels_b {
        marginals.entry(b).or_default().1 += 1;
    }
    let p_e: f64 = marginals
        .values()
        .map(|&(ca, cb)| (ca as f64 / n) * (cb as f64 / n))
        .sum();

    if p_e == 1.0 {
        return if p_o == 1.0 {
            Ok(1.0)
        } else {
            Err(Error::InvalidInput("kappa undefined: chance agreement is 1".into()))
        };
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}

/// Fraction of items with matching labels.
pub fn raw_agreement<T: PartialEq>(labels_a: &[T], labels_b: &[T]) -> Result<f64> {
    if labels_a.len() != labels_b.len() || labels_a.is_empty() {
        return Err(Error::InvalidInput("label lists must be non-empty and equal length".into()));
    }
    Ok(labels_a.iter().zip(labels_b).filter(|(a, b)| a == b).count() as f64 / labels_a.len() as f64)
}
