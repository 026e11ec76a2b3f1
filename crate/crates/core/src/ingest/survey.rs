use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::SurveyRecord;

pub const DEFAULT_ENJOYMENT_MAX: u32 = 9;

const COLUMNS: [&str; 8] = [
    "conversation_id",
    "speaker",
    "enjoyment",
    "gender",
    "age",
    "comment_positive",
    "comment_negative",
    "outcome",
];

pub fn parse_survey(path: impl AsRef<Path>, enjoyment_max: u32) -> Result<Vec<SurveyRecord>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_survey_str_at(path, &text, enjoyment_max)
}

pub fn parse_survey_str(text: &str, enjoyment_max: u32) -> Result<Vec<SurveyRecord>> {
    parse_survey_str_at(Path::new("<input>"), text, enjoyment_max)
}

fn parse_survey_str_at(path: &Path, text: &str, enjoyment_max: u32) -> Result<Vec<SurveyRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| Error::parse(path, 1, e.to_string()))?
        .clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Ok(Vec::new());
    }
    let names: Vec<&str> = headers.iter().map(str::trim).collect();
    for required in &COLUMNS[..3] {
        if !names.contains(required) {
            return Err(Error::parse(path, 1, format!("missing column `{required}`")));
        }
    }
    for name in &names {
        if !COLUMNS.contains(name) {
            log::warn!("{}: ignoring unknown column `{}`", path.display(), name);
        }
    }
    let col = |name: &str| names.iter().position(|n| *n == name);
    let idx: Vec<Option<usize>> = COLUMNS.iter().map(|c| col(c)).collect();

    let mut records = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            Error::parse(path, line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let get = |k: usize| -> Option<String> {
            idx[k]
                .and_then(|i| record.get(i))
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string)
        };
        let conversation_id =
            get(0).ok_or_else(|| Error::parse(path, line, "missing conversation_id"))?;
        let speaker = get(1).ok_or_else(|| Error::parse(path, line, "missing speaker"))?;
        let raw = get(2).ok_or_else(|| Error::parse(path, line, "missing enjoyment"))?;
        let enjoyment: i64 = raw
            .parse()
            .map_err(|_| Error::parse(path, line, format!("enjoyment is not an integer: {raw:?}")))?;
        if enjoyment < 0 || enjoyment > enjoyment_max as i64 {
            return Err(Error::parse(
                path,
                line,
                format!("enjoyment {enjoyment} outside [0, {enjoyment_max}]"),
            ));
        }
        let age = match get(4) {
            Some(a) => Some(
                a.parse::<u32>()
                    .map_err(|_| Error::parse(path, line, format!("age is not an integer: {a:?}")))?,
            ),
            None => None,
        };
        records.push(SurveyRecord {
            conversation_id,
            speaker,
            enjoyment: enjoyment as u32,
            gender: get(3),
            age,
            comment_positive: get(5),
            comment_negative: get(6),
            outcome: get(7),
        });
    }
    Ok(records)
}

/// Conversation ids in `records` that no known conversation matches. Each is
/// logged as a warning.
pub fn unmatched_survey_ids<'a>(
    records: &'a [SurveyRecord],
    known: &BTreeSet<String>,
) -> BTreeSet<&'a str> {
    let missing: BTreeSet<&str> = records
        .iter()
        .map(|r| r.conversation_id.as_str())
        .filter(|id| !known.contains(*id))
        .collect();
    for id in &missing {
        log::warn!("survey conversation `{id}` has no matching transcript");
    }
    missing
}
