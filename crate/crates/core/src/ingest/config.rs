use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{StereotypeThresholds, WindowConfig};

/// Which end of the imbalance distribution counts as "balanced".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuartileDirection {
    /// The lowest-imbalance quartile is the balanced group.
    #[default]
    LowIsBalanced,
    HighIsBalanced,
}

fn default_ngram_max() -> usize {
    3
}
fn default_alpha() -> f64 {
    0.01
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FightinWordsConfig {
    #[serde(default = "default_ngram_max")]
    pub ngram_max: usize,
    /// Symmetric Dirichlet pseudo-count per n-gram.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

impl Default for FightinWordsConfig {
    fn default() -> Self {
        Self {
            ngram_max: default_ngram_max(),
            alpha: default_alpha(),
        }
    }
}

fn default_mixed_fraction() -> f64 {
    0.60
}

/// Everything a batch run needs besides its inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    #[serde(default)]
    pub window: WindowConfig,
    #[serde(default)]
    pub stereotypes: StereotypeThresholds,
    /// Length of the leading and trailing segments compared for mixed
    /// dynamics, as a fraction of the conversation.
    #[serde(default = "default_mixed_fraction")]
    pub mixed_segment_fraction: f64,
    #[serde(default)]
    pub quartile_direction: QuartileDirection,
    #[serde(default)]
    pub fightin_words: FightinWordsConfig,
    #[serde(default)]
    pub rng_seed: u64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            window: WindowConfig::default(),
            stereotypes: StereotypeThresholds::default(),
            mixed_segment_fraction: default_mixed_fraction(),
            quartile_direction: QuartileDirection::default(),
            fightin_words: FightinWordsConfig::default(),
            rng_seed: 0,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        self.window.validate()?;
        self.stereotypes.validate()?;
        if !(self.mixed_segment_fraction > 0.5 && self.mixed_segment_fraction < 1.0) {
            return Err(Error::Config {
                key: "mixed_segment_fraction".into(),
                message: format!("must be in (0.5, 1), got {}", self.mixed_segment_fraction),
            });
        }
        if self.fightin_words.ngram_max < 1 {
            return Err(Error::Config {
                key: "fightin_words.ngram_max".into(),
                message: "must be at least 1".into(),
            });
        }
        if !(self.fightin_words.alpha > 0.0 && self.fightin_words.alpha.is_finite()) {
            return Err(Error::Config {
                key: "fightin_words.alpha".into(),
                message: format!("must be positive, got {}", self.fightin_words.alpha),
            });
        }
        Ok(())
    }

    /// Parses a JSON config document. Missing keys take defaults, unknown
    /// keys are rejected, and type errors name the offending key path.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: AnalysisConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let key = e.path().to_string();
            Error::Config {
                key,
                message: e.into_inner().to_string(),
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<AnalysisConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    AnalysisConfig::from_json_str(&text)
}
