use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BootstrapStatistic {
    Mean,
    /// Fraction of values equal to the given maximum score.
    ProportionMax(f64),
}

impl BootstrapStatistic {
    pub fn evaluate(self, values: &[f64]) -> f64 {
        let n = values.len() as f64;
        match self {
            BootstrapStatistic::Mean => values.iter().sum::<f64>() / n,
            BootstrapStatistic::ProportionMax(max) => {
                values.iter().filter(|&&v| v == max).count() as f64 / n
            }
        }
    }
}

/// Linear-interpolation quantile of sorted data.
pub(crate) fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Percentile bootstrap interval.
///
/// Resample `i` draws from its own ChaCha stream `(seed, i)`, so the interval
/// depends only on the inputs and not on evaluation order.
pub fn bootstrap_ci(
    samples: &[f64],
    statistic: BootstrapStatistic,
    level: f64,
    n_resamples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(Error::Empty("bootstrap samples"));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidInput(format!(
            "confidence level must be in (0, 1), got {level}"
        )));
    }
    if n_resamples == 0 {
        return Err(Error::InvalidInput("n_resamples must be positive".into()));
    }

    let n = samples.len();
    let mut draw = vec![0.0; n];
    let mut stats: Vec<f64> = (0..n_resamples)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            for slot in draw.iter_mut() {
                *slot = samples[rng.gen_range(0..n)];
            }
            statistic.evaluate(&draw)
        })
        .collect();
    stats.sort_by(f64::total_cmp);
    let alpha = (1.0 - level) / 2.0;
    Ok((
        quantile_sorted(&stats, alpha),
        quantile_sorted(&stats, 1.0 - alpha),
    ))
}
