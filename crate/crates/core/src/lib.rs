//! Talk-time sharing dynamics for timestamped conversations.
//!
//! The crate measures how speaking time is split between the parties of a
//! conversation: overall imbalance, sliding-window dominance regimes, a
//! three-way typology of conversations built from the regime mix, flips
//! between dominant parties, and shifts between the opening and closing parts
//! of a conversation. Corpus statistics and SVG renderers sit on top.
//!
//! ```
//! use talkshare::{analyze, AnalysisConfig, Conversation, Stereotype, Utterance};
//!
//! let conv = Conversation::new("demo", vec![
//!     Utterance::new("A", 0.0, 150.0),
//!     Utterance::new("B", 150.0, 300.0),
//!     Utterance::new("A", 300.0, 450.0),
//!     Utterance::new("B", 450.0, 600.0),
//! ]);
//! let report = analyze(&conv, &AnalysisConfig::default(), None).unwrap();
//! assert_eq!(report.stereotype, Stereotype::AlternatingDominance);
//! ```

pub mod dynamics;
pub mod error;
pub mod ingest;
pub mod model;
pub mod stats;
pub mod synth;
pub mod viz;

pub use dynamics::{
    analyze, classify, composition, conversation_imbalance, count_flips, label_window,
    make_windows, make_windows_with_roles, mixed_dynamics, talk_time, DynamicsReport,
    MixedDynamics, RegimeSequence,
};
pub use error::{Error, Result};
pub use ingest::{AnalysisConfig, RoleMap, TranscriptFormat};
pub use model::{
    validate_conversation, Composition, Conversation, Finding, ImbalanceResult, Regime, Roles,
    Severity, Stereotype, StereotypeThresholds, SurveyRecord, Utterance, WindowConfig,
    WindowResult,
};
pub use synth::{synthesize, Blueprint, Segment, SegmentRegime};
