//! Readers for transcripts, survey metadata, role maps, interval files, and
//! the analysis configuration.

mod config;
mod intervals;
mod roles;
mod survey;
mod transcripts;

pub use config::{load_config, AnalysisConfig, FightinWordsConfig, QuartileDirection};
pub use intervals::{parse_intervals, parse_intervals_str, IntervalMap};
pub use roles::{load_role_map, RoleMap};
pub use survey::{parse_survey, parse_survey_str, unmatched_survey_ids, DEFAULT_ENJOYMENT_MAX};
pub use transcripts::{
    parse_transcripts, parse_transcripts_str, parse_transcripts_with_roles, write_transcripts_csv,
    TranscriptFormat,
};
