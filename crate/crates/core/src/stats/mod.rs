//! Corpus-level statistics: phrase comparison, nonparametric tests,
//! bootstrap intervals, agreement, matching, and interval overlap.

mod agreement;
mod bootstrap;
mod fightin_words;
mod intervals;
mod matching;
mod nonparametric;
mod summary;

pub use agreement::{cohens_kappa, raw_agreement};
pub use bootstrap::{bootstrap_ci, BootstrapStatistic};
pub use fightin_words::{fightin_words, ngrams, tokenize, write_fightin_words_csv, FightinWordsEntry};
pub use intervals::{intersection_length, interval_prf, total_length, union, Prf};
pub use matching::match_pairs;
pub use nonparametric::{
    mann_whitney_u, mann_whitney_u_with, sign_test, wilcoxon_signed_rank,
    wilcoxon_signed_rank_with, PValueMethod, Tail, TestResult, MANN_WHITNEY_EXACT_MAX,
    WILCOXON_EXACT_MAX,
};
pub use summary::{crosstab, group_summary, CrossTabRow, GroupSummary};

/// Linear-interpolation quantile (`q` in [0, 1]) of unsorted data.
pub fn quantile(values: &[f64], q: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Some(bootstrap::quantile_sorted(&sorted, q.clamp(0.0, 1.0)))
}
