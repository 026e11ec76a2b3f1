//! Seeded synthetic conversations with planted talk-share regimes.
//!
//! Each segment alternates turns between the two speakers. Turn lengths are
//! drawn uniformly from `[0.5, 1.5] × turn_seconds`, the leading speaker's
//! turns are scaled so the segment hits its target share, and the whole
//! segment is then stretched to its exact length. Speech never overlaps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Conversation, Utterance};

/// Largest allowed gap between a segment's realized and target share.
pub const SHARE_TOLERANCE: f64 = 0.03;
const MAX_ATTEMPTS: u64 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentRegime {
    /// The first speaker holds the given share of talk.
    PrimaryLed(f64),
    /// The second speaker holds the given share of talk.
    SecondaryLed(f64),
    Balanced,
    Silent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub length: f64,
    pub regime: SegmentRegime,
}

impl Segment {
    pub fn new(length: f64, regime: SegmentRegime) -> Self {
        Self { length, regime }
    }
}

fn default_turn_seconds() -> f64 {
    5.0
}
fn default_id() -> String {
    "synthetic".into()
}
fn default_speakers() -> [String; 2] {
    ["A".into(), "B".into()]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Blueprint {
    #[serde(default = "default_id")]
    pub id: String,
    pub segments: Vec<Segment>,
    #[serde(default = "default_turn_seconds")]
    pub turn_seconds: f64,
    #[serde(default)]
    pub seed: u64,
    /// First and second speaker ids.
    #[serde(default = "default_speakers")]
    pub speakers: [String; 2],
}

impl Blueprint {
    pub fn new(segments: Vec<Segment>, seed: u64) -> Self {
        Self {
            id: default_id(),
            segments,
            turn_seconds: default_turn_seconds(),
            seed,
            speakers: default_speakers(),
        }
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let bp: Blueprint = serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
            key: e.path().to_string(),
            message: e.into_inner().to_string(),
        })?;
        bp.validate()?;
        Ok(bp)
    }

    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(|s| s.length).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        if self.segments.is_empty() {
            return bad("blueprint has no segments".into());
        }
        if !(self.turn_seconds > 0.0 && self.turn_seconds.is_finite()) {
            return bad(format!("turn_seconds must be positive, got {}", self.turn_seconds));
        }
        if self.speakers[0] == self.speakers[1] {
            return bad("the two speakers must differ".into());
        }
        for (i, seg) in self.segments.iter().enumerate() {
            if !(seg.length > 0.0 && seg.length.is_finite()) {
                return bad(format!("segment {i}: length must be positive"));
            }
            if let SegmentRegime::PrimaryLed(s) | SegmentRegime::SecondaryLed(s) = seg.regime {
                if !(s > 0.5 && s <= 1.0) {
                    return bad(format!("segment {i}: share must be in (0.5, 1], got {s}"));
                }
            }
        }
        Ok(())
    }
}

struct Turn {
    lead: bool,
    raw: f64,
}

/// Turns of one segment, laid out over `[t0, t0 + length]`. Returns the
/// utterances and the lead speaker's realized share.
fn segment_turns(
    rng: &mut ChaCha8Rng,
    t0: f64,
    length: f64,
    share: f64,
    turn_seconds: f64,
) -> (Vec<(bool, f64, f64)>, f64) {
    let draw = |rng: &mut ChaCha8Rng| rng.gen_range(0.5 * turn_seconds..=1.5 * turn_seconds);
    let mut turns = Vec::new();
    if share >= 1.0 {
        let n = ((length / turn_seconds).round() as usize).max(1);
        for _ in 0..n {
            turns.push(Turn {
                lead: true,
                raw: draw(rng),
            });
        }
    } else {
        // follower turns average turn_seconds, so this many pairs fill the
        // segment at the target share
        let pairs = ((length * (1.0 - share) / turn_seconds).round() as usize).max(1);
        for _ in 0..pairs {
            turns.push(Turn {
                lead: true,
                raw: draw(rng),
            });
            turns.push(Turn {
                lead: false,
                raw: draw(rng),
            });
        }
        let lead_sum: f64 = turns.iter().filter(|t| t.lead).map(|t| t.raw).sum();
        let follow_sum: f64 = turns.iter().filter(|t| !t.lead).map(|t| t.raw).sum();
        let factor = share * follow_sum / ((1.0 - share) * lead_sum);
        for t in turns.iter_mut().filter(|t| t.lead) {
            t.raw *= factor;
        }
    }

    let total: f64 = turns.iter().map(|t| t.raw).sum();
    let mut out = Vec::with_capacity(turns.len());
    let mut cum = 0.0;
    let (mut lead_time, mut all_time) = (0.0, 0.0);
    for t in &turns {
        let start = t0 + length * (cum / total);
        cum += t.raw;
        let end = if out.len() + 1 == turns.len() {
            t0 + length
        } else {
            t0 + length * (cum / total)
        };
        if end > start {
            all_time += end - start;
            if t.lead {
                lead_time += end - start;
            }
            out.push((t.lead, start, end));
        }
    }
    let realized = if all_time > 0.0 { lead_time / all_time } else { 0.0 };
    (out, realized)
}

/// Generates the conversation a blueprint describes. Identical blueprints
/// (seed included) give identical conversations.
pub fn synthesize(bp: &Blueprint) -> Result<Conversation> {
    bp.validate()?;
    let [first, second] = &bp.speakers;

    let mut last_miss = String::new();
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(bp.seed);
        rng.set_stream(attempt);
        let mut utterances = Vec::new();
        let mut t0 = 0.0;
        let mut ok = true;

        for (i, seg) in bp.segments.iter().enumerate() {
            // (first speaker leads?, lead share)
            let plan = match seg.regime {
                SegmentRegime::Silent => None,
                SegmentRegime::Balanced => Some((true, 0.5)),
                SegmentRegime::PrimaryLed(s) => Some((true, s)),
                SegmentRegime::SecondaryLed(s) => Some((false, s)),
            };
            if let Some((first_leads, share)) = plan {
                let (turns, realized) =
                    segment_turns(&mut rng, t0, seg.length, share, bp.turn_seconds);
                if (realized - share).abs() > SHARE_TOLERANCE {
                    ok = false;
                    last_miss = format!("segment {i}: realized share {realized:.4} vs target {share}");
                    break;
                }
                for (lead, start, end) in turns {
                    let speaker = if lead == first_leads { first } else { second };
                    let n = utterances.len();
                    utterances.push(
                        Utterance::new(speaker.clone(), start, end).with_text(format!("u{n}")),
                    );
                }
            }
            t0 += seg.length;
        }

        if ok {
            return Ok(Conversation::new(bp.id.clone(), utterances)
                .with_duration(bp.total_length())
                .with_party(first.clone())
                .with_party(second.clone()));
        }
    }
    Err(Error::Synthesis(format!(
        "target share unreachable after {MAX_ATTEMPTS} attempts ({last_miss})"
    )))
}
