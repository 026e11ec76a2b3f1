//! Log-odds-ratio comparison of n-gram usage between two corpora with a
//! symmetric Dirichlet prior.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FightinWordsEntry {
    /// Tokens joined by single spaces.
    pub ngram: String,
    pub count_a: u64,
    pub count_b: u64,
    /// Positive when the n-gram leans towards corpus A.
    pub z: f64,
}

/// Lowercases, deletes every character that is not a letter, digit, or
/// whitespace (so "didn't" becomes "didnt"), and splits on whitespace.
pub fn tokenize(text: &str) -> Vec<String> {
    let cleaned: String = text
        .chars()
        .filter(|c| c.is_alphanumeric() || c.is_whitespace())
        .flat_map(char::to_lowercase)
        .collect();
    cleaned.split_whitespace().map(str::to_string).collect()
}

/// All n-grams of orders `1..=n_max` within one document.
pub fn ngrams(tokens: &[String], n_max: usize) -> Vec<String> {
    let mut out = Vec::new();
    for n in 1..=n_max {
        for w in tokens.windows(n) {
            out.push(w.join(" "));
        }
    }
    out
}

fn count_ngrams(docs: &[impl AsRef<str>], n_max: usize) -> (BTreeMap<String, u64>, u64) {
    let mut counts = BTreeMap::new();
    let mut total = 0u64;
    for doc in docs {
        for g in ngrams(&tokenize(doc.as_ref()), n_max) {
            *counts.entry(g).or_insert(0) += 1;
            total += 1;
        }
    }
    (counts, total)
}

/// Ranks every n-gram of either corpus by its z-scored log-odds ratio,
/// highest (most A-leaning) first. Ties in z are ordered by n-gram.
pub fn fightin_words(
    docs_a: &[impl AsRef<str>],
    docs_b: &[impl AsRef<str>],
    ngram_max: usize,
    alpha: f64,
) -> Result<Vec<FightinWordsEntry>> {
    if docs_a.is_empty() || docs_b.is_empty() {
        return Err(Error::Empty("Fightin' Words corpus"));
    }
    if ngram_max == 0 {
        return Err(Error::InvalidInput("ngram_max must be at least 1".into()));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidInput(format!("alpha must be positive, got {alpha}")));
    }
    let (counts_a, n1) = count_ngrams(docs_a, ngram_max);
    let (counts_b, n2) = count_ngrams(docs_b, ngram_max);

    let mut vocab: BTreeMap<&str, (u64, u64)> = BTreeMap::new();
    for (g, &c) in &counts_a {
        vocab.entry(g).or_default().0 = c;
    }
    for (g, &c) in &counts_b {
        vocab.entry(g).or_default().1 = c;
    }
    if vocab.is_empty() {
        return Err(Error::Empty("Fightin' Words vocabulary"));
    }

    let alpha0 = alpha * vocab.len() as f64;
    // Both sides go through the same expression so that swapping corpora
    // negates z exactly.
    let log_odds = |y: u64, n: u64| {
        let y = y as f64;
        ((y + alpha) / (n as f64 + alpha0 - y - alpha)).ln()
    };
    let mut entries: Vec<FightinWordsEntry> = vocab
        .into_iter()
        .map(|(g, (y1, y2))| {
            let delta = log_odds(y1, n1) - log_odds(y2, n2);
            let var = 1.0 / (y1 as f64 + alpha) + 1.0 / (y2 as f64 + alpha);
            FightinWordsEntry {
                ngram: g.to_string(),
                count_a: y1,
                count_b: y2,
                z: delta / var.sqrt(),
            }
        })
        .collect();
    entries.sort_by(|a, b| b.z.total_cmp(&a.z).then_with(|| a.ngram.cmp(&b.ngram)));
    Ok(entries)
}

pub fn write_fightin_words_csv<W: Write>(entries: &[FightinWordsEntry], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::InvalidInput(format!("csv write failed: {e}"));
    w.write_record(["ngram", "count_a", "count_b", "z"]).map_err(err)?;
    for e in entries {
        w.write_record([
            e.ngram.clone(),
            e.count_a.to_string(),
            e.count_b.to_string(),
            e.z.to_string(),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::io("<output>", e))?;
    Ok(())
}
