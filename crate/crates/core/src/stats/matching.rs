use crate::error::{Error, Result};

/// Greedy tolerance matching between two groups.
///
/// Cross-group candidates whose every component differs by at most the
/// matching tolerance are taken in order of increasing maximum componentwise
/// distance (ties by position in `group_a`, then `group_b`); a candidate is
/// accepted when neither item is matched yet.
pub fn match_pairs<I: Clone>(
    group_a: &[(I, Vec<f64>)],
    group_b: &[(I, Vec<f64>)],
    tolerance: &[f64],
) -> Result<Vec<(I, I)>> {
    let dim = tolerance.len();
    for (_, key) in group_a.iter().chain(group_b) {
        if key.len() != dim {
            return Err(Error::InvalidInput(format!(
                "key has {} components, tolerance has {dim}",
                key.len()
            )));
        }
    }

    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for (i, (_, ka)) in group_a.iter().enumerate() {
        for (j, (_, kb)) in group_b.iter().enumerate() {
            let mut worst = 0.0f64;
            let mut ok = true;
            for ((x, y), tol) in ka.iter().zip(kb).zip(tolerance) {
                let d = (x - y).abs();
                if !(d <= *tol) {
                    ok = false;
                    break;
                }
                worst = worst.max(d);
            }
            if ok {
                candidates.push((worst, i, j));
            }
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut used_a = vec![false; group_a.len()];
    let mut used_b = vec![false; group_b.len()];
    let mut pairs = Vec::new();
    for (_, i, j) in candidates {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            pairs.push((group_a[i].0.clone(), group_b[j].0.clone()));
        }
    }
    Ok(pairs)
}
