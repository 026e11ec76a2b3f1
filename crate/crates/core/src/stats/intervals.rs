use serde::{Deserialize, Serialize};

/// Sorted, disjoint union of `intervals`. Touching intervals merge.
pub fn union(intervals: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut sorted: Vec<(f64, f64)> = intervals.iter().copied().filter(|(s, e)| e > s).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
    for (s, e) in sorted {
        match out.last_mut() {
            Some(last) if s <= last.1 => last.1 = last.1.max(e),
            _ => out.push((s, e)),
        }
    }
    out
}

pub fn total_length(disjoint: &[(f64, f64)]) -> f64 {
    disjoint.iter().map(|(s, e)| e - s).sum()
}

/// Overlap length of two sorted disjoint interval lists.
pub fn intersection_length(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let (mut i, mut j) = (0, 0);
    let mut total = 0.0;
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if hi > lo {
            total += hi - lo;
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Temporal precision/recall/F1 of `hypothesis` against `reference`. Each
/// list is unioned first, so self-overlaps are not double-counted. An empty
/// side yields 0 for the measure it would divide by.
pub fn interval_prf(reference: &[(f64, f64)], hypothesis: &[(f64, f64)]) -> Prf {
    let r = union(reference);
    let h = union(hypothesis);
    let (r_len, h_len) = (total_length(&r), total_length(&h));
    let overlap = intersection_length(&r, &h);
    let precision = if h_len > 0.0 {
        overlap / h_len
    } else {
        log::warn!("empty hypothesis intervals: precision reported as 0");
        0.0
    };
    let recall = if r_len > 0.0 {
        overlap / r_len
    } else {
        log::warn!("empty reference intervals: recall reported as 0");
        0.0
    };
    let f1 = if overlap > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Prf {
        precision,
        recall,
        f1,
    }
}
