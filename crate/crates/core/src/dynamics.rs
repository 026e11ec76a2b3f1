//! Talk-time measurement, sliding-window regimes, and the stereotype
//! typology built on top of them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::AnalysisConfig;
use crate::model::{
    Composition, Conversation, ImbalanceResult, Regime, Roles, Stereotype,
    StereotypeThresholds, WindowConfig, WindowResult,
};

/// Total speaking time of `party`, clipped to `span` when given.
///
/// Overlapping speech is not capped: two parties talking over each other both
/// accumulate time.
pub fn talk_time(conv: &Conversation, party: &str, span: Option<(f64, f64)>) -> Result<f64> {
    if !conv.parties.contains(party) {
        return Err(Error::UnknownParty(party.to_string()));
    }
    let (lo, hi) = span.unwrap_or((0.0, f64::INFINITY));
    Ok(conv
        .utterances
        .iter()
        .filter(|u| conv.party_of_speaker(&u.speaker) == Some(party))
        .map(|u| u.overlap(lo, hi))
        .sum())
}

/// Talk-time of every declared party over `span` (silent parties map to 0).
pub fn talk_by_party(conv: &Conversation, span: Option<(f64, f64)>) -> BTreeMap<String, f64> {
    let (lo, hi) = span.unwrap_or((0.0, f64::INFINITY));
    let mut talk: BTreeMap<String, f64> =
        conv.parties.iter().map(|p| (p.clone(), 0.0)).collect();
    for u in &conv.utterances {
        if let Some(party) = conv.party_of_speaker(&u.speaker) {
            if let Some(t) = talk.get_mut(party) {
                *t += u.overlap(lo, hi);
            }
        }
    }
    talk
}

/// Share of total talk-time held by the most talkative party. Ties go to the
/// lexicographically smaller party id.
pub fn conversation_imbalance(conv: &Conversation) -> Result<ImbalanceResult> {
    let talk = talk_by_party(conv, None);
    let total: f64 = talk.values().sum();
    if !(total > 0.0) {
        return Err(Error::SilentConversation);
    }
    if talk.len() < 2 {
        return Err(Error::NotTwoSided(talk.len()));
    }
    let mut ranking: Vec<(&String, f64)> = talk.iter().map(|(p, t)| (p, *t)).collect();
    // Stable sort keeps BTreeMap (lexicographic) order among equal talk-times.
    ranking.sort_by(|a, b| b.1.total_cmp(&a.1));
    if ranking[0].1 == ranking[1].1 {
        log::warn!(
            "{}: primary speaker tie between `{}` and `{}`, choosing `{}`",
            conv.id,
            ranking[0].0,
            ranking[1].0,
            ranking[0].0
        );
    }
    Ok(ImbalanceResult {
        value: ranking[0].1 / total,
        primary: ranking[0].0.clone(),
        secondary: ranking[1].0.clone(),
        ranking: ranking.into_iter().map(|(p, _)| p.clone()).collect(),
    })
}

/// A conversation's windows in time order, with the roles used to color them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeSequence {
    pub windows: Vec<WindowResult>,
    #[serde(rename = "config")]
    pub config_used: WindowConfig,
    #[serde(rename = "primary")]
    pub primary_party: String,
    #[serde(rename = "secondary")]
    pub secondary_party: String,
}

impl RegimeSequence {
    pub fn labels(&self) -> Vec<Regime> {
        self.windows.iter().map(|w| w.label).collect()
    }

    pub fn roles(&self) -> Roles {
        Roles::new(self.primary_party.clone(), self.secondary_party.clone())
    }
}

/// Number of full windows of length `k` that fit in `length` seconds at
/// stride `l`: `floor((length - k) / l) + 1`, or 0 when `length < k`.
pub fn window_count(length: f64, k: f64, l: f64) -> usize {
    if !(length >= k) {
        return 0;
    }
    let q = (length - k) / l;
    // Decimal inputs such as 0.3 s strides land a hair off exact multiples;
    // snap quotients within rounding noise of an integer.
    let nearest = q.round();
    let steps = if (q - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        q.floor()
    };
    steps as usize + 1
}

/// Windows over the whole conversation, colored by conversation-level roles.
pub fn make_windows(conv: &Conversation, cfg: &WindowConfig) -> Result<RegimeSequence> {
    let imbalance = conversation_imbalance(conv)?;
    let roles = Roles::new(imbalance.primary, imbalance.secondary);
    make_windows_with_roles(conv, cfg, &roles)
}

pub fn make_windows_with_roles(
    conv: &Conversation,
    cfg: &WindowConfig,
    roles: &Roles,
) -> Result<RegimeSequence> {
    make_windows_in_span(conv, cfg, roles, (0.0, conv.duration))
}

/// Windows whose start and end both lie inside `span`, starting at its left
/// edge.
pub fn make_windows_in_span(
    conv: &Conversation,
    cfg: &WindowConfig,
    roles: &Roles,
    span: (f64, f64),
) -> Result<RegimeSequence> {
    cfg.validate()?;
    let (lo, hi) = span;
    let length = hi - lo;
    if !(length >= cfg.k_seconds) {
        return Err(Error::TooShort {
            duration: length,
            window: cfg.k_seconds,
        });
    }
    let n = window_count(length, cfg.k_seconds, cfg.l_seconds);
    let windows = (0..n)
        .map(|i| {
            let start = lo + i as f64 * cfg.l_seconds;
            let end = start + cfg.k_seconds;
            let talk = talk_by_party(conv, Some((start, end)));
            let (label, dominant_party, dominance_fraction) = label_window(&talk, cfg, roles);
            WindowResult {
                start,
                end,
                talk_by_party: talk,
                label,
                dominant_party,
                dominance_fraction,
            }
        })
        .collect();
    Ok(RegimeSequence {
        windows,
        config_used: cfg.clone(),
        primary_party: roles.primary.clone(),
        secondary_party: roles.secondary.clone(),
    })
}

/// Labels one window from its per-party talk seconds.
///
/// A party is a candidate when its share strictly exceeds its own threshold.
/// With several candidates the largest margin above threshold wins, and an
/// exact margin tie is gray. Gray windows report the largest share as their
/// fraction (0 when silent).
pub fn label_window(
    talk: &BTreeMap<String, f64>,
    cfg: &WindowConfig,
    roles: &Roles,
) -> (Regime, Option<String>, f64) {
    let total: f64 = talk.values().sum();
    if total < cfg.silence_floor_seconds || !(total > 0.0) {
        return (Regime::Gray, None, 0.0);
    }

    let mut best: Option<(&str, f64, f64)> = None;
    let mut tied = false;
    let mut max_share = 0.0f64;
    for (party, t) in talk {
        let share = t / total;
        max_share = max_share.max(share);
        let margin = share - cfg.threshold_for(party);
        if margin <= 0.0 {
            continue;
        }
        match best {
            Some((_, _, m)) if margin < m => {}
            Some((_, _, m)) if margin == m => tied = true,
            _ => {
                best = Some((party, share, margin));
                tied = false;
            }
        }
    }

    match best {
        Some((party, share, _)) if !tied => {
            let label = if party == roles.primary {
                Regime::Blue
            } else {
                Regime::Red
            };
            (label, Some(party.to_string()), share)
        }
        _ => (Regime::Gray, None, max_share),
    }
}

pub fn composition(seq: &RegimeSequence) -> Result<Composition> {
    Composition::from_labels(seq.labels()).ok_or(Error::Empty("regime sequence has no windows"))
}

/// Checks the stereotypes in precedence order: dominating throughout, then
/// alternating dominance, then back-and-forth. Each test is a strict
/// exceedance.
pub fn classify(c: &Composition, t: &StereotypeThresholds) -> Stereotype {
    if c.blue_frac > t.blue_min {
        Stereotype::DominatingThroughout
    } else if c.red_frac > t.red_min {
        Stereotype::AlternatingDominance
    } else if c.gray_frac > t.gray_min {
        Stereotype::BackAndForth
    } else {
        Stereotype::Other
    }
}

/// Blue→red and red→blue transitions once gray windows are removed.
pub fn count_flips(labels: &[Regime]) -> usize {
    let mut runs = 0usize;
    let mut last = None;
    for &l in labels.iter().filter(|&&l| l != Regime::Gray) {
        if last != Some(l) {
            runs += 1;
            last = Some(l);
        }
    }
    runs.saturating_sub(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixedDynamics {
    pub first: Stereotype,
    pub last: Stereotype,
    pub transition: bool,
}

/// Classifies the leading and trailing `frac` of the conversation separately.
/// Both segments use the conversation-level `roles`.
pub fn mixed_dynamics(
    conv: &Conversation,
    cfg: &WindowConfig,
    roles: &Roles,
    thresholds: &StereotypeThresholds,
    frac: f64,
) -> Result<MixedDynamics> {
    if !(frac > 0.5 && frac < 1.0) {
        return Err(Error::InvalidInput(format!(
            "mixed segment fraction must be in (0.5, 1), got {frac}"
        )));
    }
    let d = conv.duration;
    let classify_span = |span: (f64, f64)| -> Result<Stereotype> {
        let seq = make_windows_in_span(conv, cfg, roles, span)?;
        Ok(classify(&composition(&seq)?, thresholds))
    };
    let first = classify_span((0.0, frac * d))?;
    let last = classify_span(((1.0 - frac) * d, d))?;
    Ok(MixedDynamics {
        first,
        last,
        transition: first != last && first != Stereotype::Other && last != Stereotype::Other,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsReport {
    pub id: String,
    pub imbalance: ImbalanceResult,
    #[serde(flatten)]
    pub regimes: RegimeSequence,
    pub composition: Composition,
    pub stereotype: Stereotype,
    pub flips: usize,
    /// Absent when the leading/trailing segments are shorter than a window.
    pub mixed: Option<MixedDynamics>,
}

/// Full per-conversation analysis.
///
/// Roles come from the conversation-level imbalance unless `expected_primary`
/// pins the primary party (the other party then becomes secondary).
pub fn analyze(
    conv: &Conversation,
    cfg: &AnalysisConfig,
    expected_primary: Option<&str>,
) -> Result<DynamicsReport> {
    cfg.validate()?;
    conv.ensure_valid()?;
    if conv.parties.len() != 2 {
        return Err(Error::NotTwoSided(conv.parties.len()));
    }
    if conv.duration < cfg.window.k_seconds {
        return Err(Error::TooShort {
            duration: conv.duration,
            window: cfg.window.k_seconds,
        });
    }

    let imbalance = conversation_imbalance(conv)?;
    let roles = match expected_primary {
        Some(p) => {
            if !conv.parties.contains(p) {
                return Err(Error::UnknownParty(p.to_string()));
            }
            let other = conv
                .parties
                .iter()
                .find(|q| q.as_str() != p)
                .expect("two parties");
            Roles::new(p, other.clone())
        }
        None => Roles::new(imbalance.primary.clone(), imbalance.secondary.clone()),
    };

    let regimes = make_windows_with_roles(conv, &cfg.window, &roles)?;
    let comp = composition(&regimes)?;
    let stereotype = classify(&comp, &cfg.stereotypes);
    let flips = count_flips(&regimes.labels());
    let mixed = match mixed_dynamics(
        conv,
        &cfg.window,
        &roles,
        &cfg.stereotypes,
        cfg.mixed_segment_fraction,
    ) {
        Ok(m) => Some(m),
        Err(Error::TooShort { .. }) => None,
        Err(e) => return Err(e),
    };

    Ok(DynamicsReport {
        id: conv.id.clone(),
        imbalance,
        regimes,
        composition: comp,
        stereotype,
        flips,
        mixed,
    })
}
