//! Domain types shared across the crate.
//!
//! Times are seconds as `f64`. Comparisons are exact unless a tolerance is
//! stated at the call site.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One timestamped speech span by one speaker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Utterance {
    pub speaker: String,
    pub start: f64,
    pub end: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
}

impl Utterance {
    pub fn new(speaker: impl Into<String>, start: f64, end: f64) -> Self {
        Self {
            speaker: speaker.into(),
            start,
            end,
            text: None,
        }
    }

    pub fn with_text(mut self, text: impl Into<String>) -> Self {
        self.text = Some(text.into());
        self
    }

    pub fn duration(&self) -> f64 {
        self.end - self.start
    }

    /// Length of the overlap between this utterance and `[lo, hi]`.
    pub fn overlap(&self, lo: f64, hi: f64) -> f64 {
        let a = self.start.max(lo);
        let b = self.end.min(hi);
        if b > a {
            b - a
        } else {
            0.0
        }
    }
}

fn canonical_order(a: &Utterance, b: &Utterance) -> std::cmp::Ordering {
    a.start
        .total_cmp(&b.start)
        .then_with(|| a.speaker.cmp(&b.speaker))
        .then_with(|| a.end.total_cmp(&b.end))
}

/// Ordered utterances plus the party grouping of their speakers.
///
/// Parties are what the analysis compares. By default each speaker is its own
/// party; a role map can group several speakers into one side.
#[derive(Debug, Clone, PartialEq)]
pub struct Conversation {
    pub id: String,
    pub utterances: Vec<Utterance>,
    pub duration: f64,
    pub parties: BTreeSet<String>,
    pub party_of: BTreeMap<String, String>,
}

impl Conversation {
    /// Builds a conversation with identity party map and duration equal to the
    /// latest utterance end. Utterances are sorted canonically.
    pub fn new(id: impl Into<String>, utterances: Vec<Utterance>) -> Self {
        let mut conv = Self {
            id: id.into(),
            utterances,
            duration: 0.0,
            parties: BTreeSet::new(),
            party_of: BTreeMap::new(),
        };
        conv.canonicalize();
        conv.duration = conv.max_end();
        for u in &conv.utterances {
            conv.party_of
                .entry(u.speaker.clone())
                .or_insert_with(|| u.speaker.clone());
        }
        conv.parties = conv.party_of.values().cloned().collect();
        conv
    }

    pub fn with_duration(mut self, duration: f64) -> Self {
        self.duration = duration;
        self
    }

    /// Replaces the speaker → party map. Parties named by the map are added
    /// to `parties`; speakers the map does not cover are left unmapped so
    /// validation reports them.
    pub fn with_party_map(mut self, party_of: BTreeMap<String, String>) -> Self {
        self.parties = party_of.values().cloned().collect();
        self.party_of = party_of;
        self
    }

    /// Declares a party that may have no utterances.
    pub fn with_party(mut self, party: impl Into<String>) -> Self {
        self.parties.insert(party.into());
        self
    }

    pub fn canonicalize(&mut self) {
        self.utterances.sort_by(canonical_order);
    }

    pub fn max_end(&self) -> f64 {
        self.utterances
            .iter()
            .map(|u| u.end)
            .fold(0.0, f64::max)
    }

    pub fn party_of_speaker(&self, speaker: &str) -> Option<&str> {
        self.party_of.get(speaker).map(String::as_str)
    }

    pub fn validate(&self) -> Vec<Finding> {
        validate_conversation(self)
    }

    /// Fails with the first error finding, logging warnings.
    pub fn ensure_valid(&self) -> Result<()> {
        let mut first_error = None;
        for f in self.validate() {
            match f.severity {
                Severity::Warning => log::warn!("{}: {}", self.id, f),
                Severity::Error => {
                    if first_error.is_none() {
                        first_error = Some(f);
                    }
                }
            }
        }
        match first_error {
            None => Ok(()),
            Some(f) => Err(Error::Validation {
                id: self.id.clone(),
                message: f.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Finding {
    pub severity: Severity,
    /// Index into `Conversation::utterances`, when the finding concerns one.
    pub utterance: Option<usize>,
    pub message: String,
}

impl Finding {
    fn error(utterance: Option<usize>, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            utterance,
            message: message.into(),
        }
    }

    fn warning(utterance: Option<usize>, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            utterance,
            message: message.into(),
        }
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.utterance {
            Some(i) => write!(f, "utterance {}: {}", i, self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// Checks every structural invariant of a conversation. An empty result means
/// the conversation is well-formed.
pub fn validate_conversation(conv: &Conversation) -> Vec<Finding> {
    let mut findings = Vec::new();

    for (i, u) in conv.utterances.iter().enumerate() {
        if !u.start.is_finite() || !u.end.is_finite() {
            findings.push(Finding::error(Some(i), "non-finite timestamp"));
            continue;
        }
        if u.start < 0.0 {
            findings.push(Finding::error(Some(i), "negative start time"));
        }
        if u.end <= u.start {
            findings.push(Finding::error(Some(i), "non-positive duration"));
        }
        if !conv.party_of.contains_key(&u.speaker) {
            findings.push(Finding::error(
                Some(i),
                format!("speaker `{}` missing from party map", u.speaker),
            ));
        }
        if u.end > conv.duration {
            findings.push(Finding::error(
                Some(i),
                format!("ends at {} after conversation duration {}", u.end, conv.duration),
            ));
        }
    }

    if conv
        .utterances
        .windows(2)
        .any(|w| canonical_order(&w[0], &w[1]).is_gt())
    {
        findings.push(Finding::warning(None, "utterances not in canonical order"));
    }

    for party in conv.party_of.values() {
        if !conv.parties.contains(party) {
            findings.push(Finding::error(
                None,
                format!("party `{party}` used by the party map but not declared"),
            ));
        }
    }

    if conv.parties.len() < 2 {
        findings.push(Finding::error(
            None,
            format!("needs at least 2 parties, found {}", conv.parties.len()),
        ));
    }

    findings
}

fn default_window_length() -> f64 {
    150.0
}
fn default_stride() -> f64 {
    30.0
}
fn default_dominance() -> f64 {
    0.6
}
fn default_silence_floor() -> f64 {
    1.0
}

/// Sliding-window parameters and per-party dominance thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    /// Window length in seconds.
    #[serde(default = "default_window_length")]
    pub k_seconds: f64,
    /// Stride between consecutive window starts.
    #[serde(default = "default_stride")]
    pub l_seconds: f64,
    /// Threshold shared by every party without an explicit override.
    #[serde(default = "default_dominance", alias = "m")]
    pub dominance_threshold: f64,
    #[serde(default)]
    pub party_thresholds: BTreeMap<String, f64>,
    /// Windows with less total talk than this are gray.
    #[serde(default = "default_silence_floor")]
    pub silence_floor_seconds: f64,
}

impl Default for WindowConfig {
    fn default() -> Self {
        Self {
            k_seconds: default_window_length(),
            l_seconds: default_stride(),
            dominance_threshold: default_dominance(),
            party_thresholds: BTreeMap::new(),
            silence_floor_seconds: default_silence_floor(),
        }
    }
}

impl WindowConfig {
    pub fn new(k_seconds: f64, l_seconds: f64, dominance_threshold: f64) -> Self {
        Self {
            k_seconds,
            l_seconds,
            dominance_threshold,
            ..Self::default()
        }
    }

    pub fn with_party_threshold(mut self, party: impl Into<String>, threshold: f64) -> Self {
        self.party_thresholds.insert(party.into(), threshold);
        self
    }

    pub fn threshold_for(&self, party: &str) -> f64 {
        self.party_thresholds
            .get(party)
            .copied()
            .unwrap_or(self.dominance_threshold)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, message: String| {
            Err(Error::Config {
                key: format!("window.{key}"),
                message,
            })
        };
        if !(self.k_seconds > 0.0 && self.k_seconds.is_finite()) {
            return bad("k_seconds", format!("must be positive, got {}", self.k_seconds));
        }
        if !(self.l_seconds > 0.0) {
            return bad("l_seconds", format!("must be positive, got {}", self.l_seconds));
        }
        if self.l_seconds > self.k_seconds {
            return bad(
                "l_seconds",
                format!(
                    "stride {} exceeds window length {}",
                    self.l_seconds, self.k_seconds
                ),
            );
        }
        if !(self.dominance_threshold > 0.0 && self.dominance_threshold <= 1.0) {
            return bad(
                "dominance_threshold",
                format!("must be in (0, 1], got {}", self.dominance_threshold),
            );
        }
        for (party, t) in &self.party_thresholds {
            if !(*t > 0.0 && *t <= 1.0) {
                return bad(
                    &format!("party_thresholds.{party}"),
                    format!("must be in (0, 1], got {t}"),
                );
            }
        }
        if !(self.silence_floor_seconds >= 0.0) {
            return bad(
                "silence_floor_seconds",
                format!("must be non-negative, got {}", self.silence_floor_seconds),
            );
        }
        Ok(())
    }
}

/// Dominance label of one window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Regime {
    /// The primary party dominates.
    Blue,
    /// A non-primary party dominates.
    Red,
    /// Nobody dominates, or the window is silent.
    Gray,
}

impl Regime {
    pub fn letter(self) -> char {
        match self {
            Regime::Blue => 'B',
            Regime::Red => 'R',
            Regime::Gray => 'G',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'B' => Some(Regime::Blue),
            'R' => Some(Regime::Red),
            'G' => Some(Regime::Gray),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowResult {
    pub start: f64,
    pub end: f64,
    #[serde(rename = "talk")]
    pub talk_by_party: BTreeMap<String, f64>,
    pub label: Regime,
    #[serde(rename = "dominant")]
    pub dominant_party: Option<String>,
    /// Dominant party's share of window talk; for gray windows, the largest
    /// share (0 when silent).
    #[serde(rename = "fraction")]
    pub dominance_fraction: f64,
}

/// Fractions of blue, red, and gray windows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Composition {
    pub blue_frac: f64,
    pub red_frac: f64,
    pub gray_frac: f64,
}

impl Composition {
    /// Returns `None` for an empty label sequence.
    pub fn from_labels<I: IntoIterator<Item = Regime>>(labels: I) -> Option<Self> {
        let (mut b, mut r, mut g) = (0usize, 0usize, 0usize);
        for l in labels {
            match l {
                Regime::Blue => b += 1,
                Regime::Red => r += 1,
                Regime::Gray => g += 1,
            }
        }
        let n = b + r + g;
        if n == 0 {
            return None;
        }
        let n = n as f64;
        Some(Self {
            blue_frac: b as f64 / n,
            red_frac: r as f64 / n,
            gray_frac: g as f64 / n,
        })
    }

    pub fn get(&self, regime: Regime) -> f64 {
        match regime {
            Regime::Blue => self.blue_frac,
            Regime::Red => self.red_frac,
            Regime::Gray => self.gray_frac,
        }
    }
}

fn default_gray_min() -> f64 {
    0.60
}
fn default_red_min() -> f64 {
    0.25
}
fn default_blue_min() -> f64 {
    0.75
}

/// Exceedance cuts on a composition that define the three stereotypes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StereotypeThresholds {
    #[serde(default = "default_gray_min")]
    pub gray_min: f64,
    #[serde(default = "default_red_min")]
    pub red_min: f64,
    #[serde(default = "default_blue_min")]
    pub blue_min: f64,
}

impl Default for StereotypeThresholds {
    fn default() -> Self {
        Self {
            gray_min: default_gray_min(),
            red_min: default_red_min(),
            blue_min: default_blue_min(),
        }
    }
}

impl StereotypeThresholds {
    pub fn validate(&self) -> Result<()> {
        for (key, v) in [
            ("gray_min", self.gray_min),
            ("red_min", self.red_min),
            ("blue_min", self.blue_min),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Config {
                    key: format!("stereotypes.{key}"),
                    message: format!("must be in (0, 1), got {v}"),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Stereotype {
    DominatingThroughout,
    BackAndForth,
    AlternatingDominance,
    Other,
}

impl Stereotype {
    pub const ALL: [Stereotype; 4] = [
        Stereotype::DominatingThroughout,
        Stereotype::BackAndForth,
        Stereotype::AlternatingDominance,
        Stereotype::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Stereotype::DominatingThroughout => "DominatingThroughout",
            Stereotype::BackAndForth => "BackAndForth",
            Stereotype::AlternatingDominance => "AlternatingDominance",
            Stereotype::Other => "Other",
        }
    }
}

impl fmt::Display for Stereotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Stereotype {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Stereotype::ALL
            .into_iter()
            .find(|st| st.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidInput(format!("unknown stereotype `{s}`")))
    }
}

/// Per-speaker survey answers joined to a conversation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyRecord {
    pub conversation_id: String,
    pub speaker: String,
    pub enjoyment: u32,
    pub gender: Option<String>,
    pub age: Option<u32>,
    pub comment_positive: Option<String>,
    pub comment_negative: Option<String>,
    pub outcome: Option<String>,
}

/// Conversation-level share of the most talkative party.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImbalanceResult {
    pub value: f64,
    pub primary: String,
    pub secondary: String,
    /// Every party, most talkative first.
    #[serde(default)]
    pub ranking: Vec<String>,
}

/// Which party is drawn blue and which red.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Roles {
    pub primary: String,
    pub secondary: String,
}

impl Roles {
    pub fn new(primary: impl Into<String>, secondary: impl Into<String>) -> Self {
        Self {
            primary: primary.into(),
            secondary: secondary.into(),
        }
    }

    pub fn swapped(&self) -> Self {
        Self::new(self.secondary.clone(), self.primary.clone())
    }
}
