//! Rank and sign tests.
//!
//! Mann–Whitney and Wilcoxon compute the exact permutation distribution of
//! their statistic for small samples (ties included, through doubled
//! midranks) and fall back to the tie-corrected normal approximation with
//! continuity correction once the samples grow.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub method: String,
    pub n: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PValueMethod {
    /// Exact for small samples, normal approximation otherwise.
    #[default]
    Auto,
    Exact,
    Asymptotic,
}

/// Pooled samples above this size use the normal approximation under `Auto`.
pub const MANN_WHITNEY_EXACT_MAX: usize = 20;
/// Non-zero differences above this count use the normal approximation under
/// `Auto`.
pub const WILCOXON_EXACT_MAX: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    One,
    Two,
}

/// Midranks (1-based) of `values`, doubled so that ties stay integral, plus
/// the tie-group sizes.
fn doubled_midranks(values: &[f64]) -> (Vec<u64>, Vec<u64>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0u64; values.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // positions i..=j (0-based) share rank ((i+1) + (j+1)) / 2
        let doubled = (i + 1 + j + 1) as u64;
        for &k in &order[i..=j] {
            ranks[k] = doubled;
        }
        ties.push((j - i + 1) as u64);
        i = j + 1;
    }
    (ranks, ties)
}

fn tie_term(ties: &[u64]) -> f64 {
    ties.iter().map(|&t| (t * t * t - t) as f64).sum()
}

/// Two-sided p from a standard-normal z with continuity correction already
/// applied to the numerator.
fn two_sided_normal(deviation: f64, sd: f64) -> f64 {
    if !(sd > 0.0) {
        return 1.0;
    }
    let z = (deviation.abs() - 0.5).max(0.0) / sd;
    erfc(z / std::f64::consts::SQRT_2).min(1.0)
}

fn two_sided_from_counts(counts: &[f64], observed: usize) -> f64 {
    let total: f64 = counts.iter().sum();
    let lower: f64 = counts[..=observed].iter().sum();
    let upper: f64 = counts[observed..].iter().sum();
    (2.0 * lower.min(upper) / total).min(1.0)
}

/// Mann–Whitney U test. The statistic is `U` for sample `a`.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<TestResult> {
    mann_whitney_u_with(a, b, PValueMethod::Auto)
}

pub fn mann_whitney_u_with(a: &[f64], b: &[f64], method: PValueMethod) -> Result<TestResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("Mann-Whitney samples"));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("Mann-Whitney samples must be finite".into()));
    }
    let (na, nb) = (a.len(), b.len());
    let n = na + nb;
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = doubled_midranks(&pooled);
    let rank_sum_a2: u64 = ranks[..na].iter().sum();
    // 2·U_a = 2·R_a − na(na+1)
    let u2 = rank_sum_a2 - (na * (na + 1)) as u64;
    let u = u2 as f64 / 2.0;

    let exact = match method {
        PValueMethod::Exact => true,
        PValueMethod::Asymptotic => false,
        PValueMethod::Auto => n <= MANN_WHITNEY_EXACT_MAX,
    };

    let p_value = if exact {
        // counts[k][s]: ways to pick k of the pooled items with doubled rank sum s
        let max_sum: u64 = ranks.iter().sum();
        let width = max_sum as usize + 1;
        let mut counts = vec![vec![0.0f64; width]; na + 1];
        counts[0][0] = 1.0;
        for &r in &ranks {
            let r = r as usize;
            for k in (1..=na).rev() {
                let (lo, hi) = counts.split_at_mut(k);
                let prev = &lo[k - 1];
                let cur = &mut hi[0];
                for s in (r..width).rev() {
                    if prev[s - r] != 0.0 {
                        cur[s] += prev[s - r];
                    }
                }
            }
        }
        two_sided_from_counts(&counts[na], rank_sum_a2 as usize)
    } else {
        let (naf, nbf, nf) = (na as f64, nb as f64, n as f64);
        let mean = naf * nbf / 2.0;
        let var = naf * nbf / 12.0 * ((nf + 1.0) - tie_term(&ties) / (nf * (nf - 1.0)));
        if n < 2 || !(var > 0.0) {
            1.0
        } else {
            two_sided_normal(u - mean, var.sqrt())
        }
    };

    Ok(TestResult {
        statistic: u,
        p_value,
        method: if exact {
            "mann_whitney_u_exact".into()
        } else {
            "mann_whitney_u_normal".into()
        },
        n: vec![na, nb],
    })
}

/// Wilcoxon signed-rank test on `first − second`. Zero differences are
/// dropped. The statistic is the sum of ranks of positive differences.
pub fn wilcoxon_signed_rank(pairs: &[(f64, f64)]) -> Result<TestResult> {
    wilcoxon_signed_rank_with(pairs, PValueMethod::Auto)
}

pub fn wilcoxon_signed_rank_with(pairs: &[(f64, f64)], method: PValueMethod) -> Result<TestResult> {
    let diffs: Vec<f64> = pairs
        .iter()
        .map(|&(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    if diffs.iter().any(|d| !d.is_finite()) {
        return Err(Error::InvalidInput("Wilcoxon differences must be finite".into()));
    }
    if diffs.is_empty() {
        return Err(Error::InvalidInput(
            "all paired differences are zero".into(),
        ));
    }
    let n = diffs.len();
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let (ranks, ties) = doubled_midranks(&abs);
    let w_plus2: u64 = ranks
        .iter()
        .zip(&diffs)
        .filter(|(_, d)| **d > 0.0)
        .map(|(r, _)| *r)
        .sum();
    let w_plus = w_plus2 as f64 / 2.0;

    let exact = match method {
        PValueMethod::Exact => true,
        PValueMethod::Asymptotic => false,
        PValueMethod::Auto => n <= WILCOXON_EXACT_MAX,
    };

    let p_value = if exact {
        let max_sum: u64 = ranks.iter().sum();
        let mut counts = vec![0.0f64; max_sum as usize + 1];
        counts[0] = 1.0;
        for &r in &ranks {
            let r = r as usize;
            for s in (r..counts.len()).rev() {
                counts[s] += counts[s - r];
            }
        }
        two_sided_from_counts(&counts, w_plus2 as usize)
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term(&ties) / 48.0;
        two_sided_normal(w_plus - mean, var.max(0.0).sqrt())
    };

    Ok(TestResult {
        statistic: w_plus,
        p_value,
        method: if exact {
            "wilcoxon_signed_rank_exact".into()
        } else {
            "wilcoxon_signed_rank_normal".into()
        },
        n: vec![n],
    })
}

/// `P(X ≥ k)` and `P(X ≤ k)` for `X ~ Binomial(n, 1/2)`.
fn binomial_half_tails(k: u64, n: u64) -> (f64, f64) {
    if n <= 62 {
        // exact integer counts; the division by 2^n is exact in f64 whenever
        // the count fits in 53 bits
        let mut c: u128 = 1;
        let mut upper: u128 = 0;
        let mut lower: u128 = 0;
        for i in 0..=n {
            if i >= k {
                upper += c;
            }
            if i <= k {
                lower += c;
            }
            c = c * (n - i) as u128 / (i + 1) as u128;
        }
        let denom = (1u128 << n) as f64;
        (upper as f64 / denom, lower as f64 / denom)
    } else {
        use statrs::function::factorial::ln_binomial;
        let ln2n = n as f64 * std::f64::consts::LN_2;
        let term = |i: u64| (ln_binomial(n, i) - ln2n).exp();
        let upper: f64 = (k..=n).map(term).sum();
        let lower: f64 = (0..=k).map(term).sum();
        (upper.min(1.0), lower.min(1.0))
    }
}

/// Exact binomial sign test with success probability 1/2. The one-tailed p is
/// `P(X ≥ successes)`; ties must be removed by the caller.
pub fn sign_test(successes: u64, n: u64, tail: Tail) -> Result<TestResult> {
    if n == 0 {
        return Err(Error::InvalidInput("sign test needs n ≥ 1".into()));
    }
    if successes > n {
        return Err(Error::InvalidInput(format!(
            "sign test successes {successes} exceed n {n}"
        )));
    }
    let p_value = match tail {
        Tail::One => binomial_half_tails(successes, n).0,
        Tail::Two => {
            // P(X ≥ s) = P(X ≤ n − s), so the smaller tail is the lower tail
            // at min(s, n − s); going through it keeps p(s) = p(n − s) exact.
            let (_, lower) = binomial_half_tails(successes.min(n - successes), n);
            (2.0 * lower).min(1.0)
        }
    };
    Ok(TestResult {
        statistic: successes as f64,
        p_value,
        method: match tail {
            Tail::One => "sign_test_one_tailed".into(),
            Tail::Two => "sign_test_two_tailed".into(),
        },
        n: vec![n as usize],
    })
}
