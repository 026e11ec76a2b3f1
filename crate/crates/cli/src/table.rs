//! The corpus summary table, its survey join, and shared configuration
//! loading.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use talkshare::ingest::{load_config, load_role_map, parse_survey, unmatched_survey_ids, QuartileDirection};
use talkshare::{AnalysisConfig, DynamicsReport, RoleMap, SurveyRecord};

use crate::ConfigArgs;

pub fn load_setup(args: &ConfigArgs) -> Result<(AnalysisConfig, Option<RoleMap>)> {
    let mut cfg = match &args.config {
        Some(p) => load_config(p)?,
        None => AnalysisConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.rng_seed = seed;
    }
    let roles = args.roles.as_ref().map(load_role_map).transpose()?;
    if let Some(r) = &roles {
        r.apply_thresholds(&mut cfg.window);
    }
    cfg.validate()?;
    Ok((cfg, roles))
}

/// One summary line per conversation, analyzed or skipped.
#[derive(Debug, Clone, Serialize)]
pub struct SummaryRow {
    pub id: String,
    pub status: &'static str,
    pub reason: Option<String>,
    pub duration: f64,
    pub imbalance: Option<f64>,
    pub primary: Option<String>,
    pub secondary: Option<String>,
    pub blue_frac: Option<f64>,
    pub red_frac: Option<f64>,
    pub gray_frac: Option<f64>,
    pub stereotype: Option<&'static str>,
    pub flips: Option<usize>,
    pub mixed_first: Option<&'static str>,
    pub mixed_last: Option<&'static str>,
    pub mixed_transition: Option<bool>,
    /// bottom / middle / top quartile of imbalance across the corpus
    pub imbalance_band: Option<&'static str>,
    /// balanced / middle / imbalanced, following the configured direction
    pub imbalance_quartile: Option<&'static str>,
}

impl SummaryRow {
    pub fn analyzed(r: &DynamicsReport, duration: f64) -> Self {
        Self {
            id: r.id.clone(),
            status: "ok",
            reason: None,
            duration,
            imbalance: Some(r.imbalance.value),
            primary: Some(r.regimes.primary_party.clone()),
            secondary: Some(r.regimes.secondary_party.clone()),
            blue_frac: Some(r.composition.blue_frac),
            red_frac: Some(r.composition.red_frac),
            gray_frac: Some(r.composition.gray_frac),
            stereotype: Some(r.stereotype.as_str()),
            flips: Some(r.flips),
            mixed_first: r.mixed.map(|m| m.first.as_str()),
            mixed_last: r.mixed.map(|m| m.last.as_str()),
            mixed_transition: r.mixed.map(|m| m.transition),
            imbalance_band: None,
            imbalance_quartile: None,
        }
    }

    pub fn skipped(id: &str, duration: f64, reason: String) -> Self {
        Self {
            id: id.to_string(),
            status: "skipped",
            reason: Some(reason),
            duration,
            imbalance: None,
            primary: None,
            secondary: None,
            blue_frac: None,
            red_frac: None,
            gray_frac: None,
            stereotype: None,
            flips: None,
            mixed_first: None,
            mixed_last: None,
            mixed_transition: None,
            imbalance_band: None,
            imbalance_quartile: None,
        }
    }
}

/// Fills the quartile columns. Cuts are linear-interpolation quartiles of the
/// analyzed rows; a value at or below the lower cut is bottom, at or above
/// the upper cut top.
pub fn assign_quartiles(rows: &mut [SummaryRow], direction: QuartileDirection) {
    let values: Vec<f64> = rows.iter().filter_map(|r| r.imbalance).collect();
    let (Some(q25), Some(q75)) = (
        talkshare::stats::quantile(&values, 0.25),
        talkshare::stats::quantile(&values, 0.75),
    ) else {
        return;
    };
    for row in rows.iter_mut() {
        let Some(v) = row.imbalance else { continue };
        let band = if v <= q25 {
            "bottom"
        } else if v >= q75 {
            "top"
        } else {
            "middle"
        };
        row.imbalance_band = Some(band);
        row.imbalance_quartile = Some(match (band, direction) {
            ("middle", _) => "middle",
            ("bottom", QuartileDirection::LowIsBalanced) | ("top", QuartileDirection::HighIsBalanced) => {
                "balanced"
            }
            _ => "imbalanced",
        });
    }
}

pub fn summary_csv(rows: &[SummaryRow]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    Ok(w.into_inner()?)
}

pub type Fields = BTreeMap<String, String>;

/// Analyzed rows of a summary CSV, keyed by conversation id.
pub fn read_summary(path: &Path) -> Result<BTreeMap<String, Fields>> {
    let mut reader =
        csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let headers = reader.headers()?.clone();
    if !headers.iter().any(|h| h == "id") {
        anyhow::bail!("{}: not a summary file (no `id` column)", path.display());
    }
    let mut out = BTreeMap::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("{}: row {}", path.display(), i + 2))?;
        let fields: Fields = headers
            .iter()
            .zip(record.iter())
            .map(|(h, v)| (h.to_string(), v.to_string()))
            .collect();
        if fields.get("status").map(String::as_str) == Some("skipped") {
            continue;
        }
        out.insert(fields["id"].clone(), fields);
    }
    Ok(out)
}

/// A survey respondent joined with their conversation's summary row.
#[derive(Debug, Clone)]
pub struct SpeakerRow {
    pub fields: Fields,
    pub record: SurveyRecord,
}

impl SpeakerRow {
    pub fn role(&self) -> &str {
        &self.fields["role"]
    }
}

/// Joins survey respondents to analyzed conversations. The `role` column is
/// primary, secondary, or other, from the speaker's party.
pub fn join(
    summary: &BTreeMap<String, Fields>,
    survey: Vec<SurveyRecord>,
    roles: Option<&RoleMap>,
) -> Vec<SpeakerRow> {
    let known: BTreeSet<String> = summary.keys().cloned().collect();
    unmatched_survey_ids(&survey, &known);
    survey
        .into_iter()
        .filter_map(|record| {
            let mut fields = summary.get(&record.conversation_id)?.clone();
            let party = roles.map_or(record.speaker.as_str(), |r| r.party_of(&record.speaker));
            let role = if fields.get("primary").map(String::as_str) == Some(party) {
                "primary"
            } else if fields.get("secondary").map(String::as_str) == Some(party) {
                "secondary"
            } else {
                "other"
            };
            fields.insert("role".into(), role.into());
            fields.insert("party".into(), party.to_string());
            fields.insert("speaker".into(), record.speaker.clone());
            fields.insert("enjoyment".into(), record.enjoyment.to_string());
            fields.insert("gender".into(), record.gender.clone().unwrap_or_default());
            fields.insert("age".into(), record.age.map(|a| a.to_string()).unwrap_or_default());
            fields.insert("outcome".into(), record.outcome.clone().unwrap_or_default());
            Some(SpeakerRow { fields, record })
        })
        .collect()
}

pub fn load_joined(
    summary: &Path,
    survey: &Path,
    roles: Option<&RoleMap>,
    enjoyment_max: u32,
) -> Result<Vec<SpeakerRow>> {
    let summary = read_summary(summary)?;
    let survey = parse_survey(survey, enjoyment_max)?;
    Ok(join(&summary, survey, roles))
}
