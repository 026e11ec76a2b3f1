use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::ingest::RoleMap;
use crate::model::{Conversation, Utterance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TranscriptFormat {
    Csv,
    Jsonl,
}

impl TranscriptFormat {
    /// `.jsonl` / `.ndjson` are JSON lines, anything else is CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("jsonl") || ext.eq_ignore_ascii_case("ndjson") => {
                TranscriptFormat::Jsonl
            }
            _ => TranscriptFormat::Csv,
        }
    }
}

const REQUIRED: [&str; 4] = ["conversation_id", "speaker", "start", "end"];
const OPTIONAL: [&str; 2] = ["text", "duration"];

struct Row {
    line: u64,
    conversation_id: String,
    utterance: Utterance,
    duration: Option<f64>,
}

/// Reads a transcript file into conversations, one per distinct id, ordered
/// by id. Every conversation is validated; the first error aborts.
pub fn parse_transcripts(path: impl AsRef<Path>, format: TranscriptFormat) -> Result<Vec<Conversation>> {
    parse_transcripts_with_roles(path, format, None)
}

/// Like [`parse_transcripts`], grouping speakers into parties with `roles`
/// before validation.
pub fn parse_transcripts_with_roles(
    path: impl AsRef<Path>,
    format: TranscriptFormat,
    roles: Option<&RoleMap>,
) -> Result<Vec<Conversation>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let rows = match format {
        TranscriptFormat::Csv => csv_rows(path, &text)?,
        TranscriptFormat::Jsonl => jsonl_rows(path, &text)?,
    };
    assemble(path, rows, roles)
}

pub fn parse_transcripts_str(
    text: &str,
    format: TranscriptFormat,
    roles: Option<&RoleMap>,
) -> Result<Vec<Conversation>> {
    let path = Path::new("<input>");
    let rows = match format {
        TranscriptFormat::Csv => csv_rows(path, text)?,
        TranscriptFormat::Jsonl => jsonl_rows(path, text)?,
    };
    assemble(path, rows, roles)
}

fn parse_time(path: &Path, line: u64, field: &str, raw: &str) -> Result<f64> {
    let v: f64 = raw
        .trim()
        .parse()
        .map_err(|_| Error::parse(path, line, format!("`{field}` is not a number: {raw:?}")))?;
    if !v.is_finite() {
        return Err(Error::parse(path, line, format!("`{field}` is not finite")));
    }
    Ok(v)
}

fn check_span(path: &Path, line: u64, start: f64, end: f64) -> Result<()> {
    if start < 0.0 {
        return Err(Error::parse(path, line, format!("negative start time {start}")));
    }
    if end <= start {
        return Err(Error::parse(
            path,
            line,
            format!("end {end} is not after start {start}"),
        ));
    }
    Ok(())
}

fn csv_rows(path: &Path, text: &str) -> Result<Vec<Row>> {
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = match rdr.headers() {
        Ok(h) => h.clone(),
        Err(e) => return Err(Error::parse(path, 1, e.to_string())),
    };
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Ok(Vec::new());
    }
    let index: BTreeMap<&str, usize> = headers.iter().enumerate().map(|(i, h)| (h.trim(), i)).collect();
    for name in REQUIRED {
        if !index.contains_key(name) {
            return Err(Error::parse(path, 1, format!("missing column `{name}`")));
        }
    }
    for name in index.keys() {
        if !REQUIRED.contains(name) && !OPTIONAL.contains(name) {
            log::warn!("{}: ignoring unknown column `{}`", path.display(), name);
        }
    }

    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            Error::parse(path, line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let field = |name: &str| index.get(name).and_then(|&i| record.get(i));
        let required = |name: &str| {
            field(name).ok_or_else(|| Error::parse(path, line, format!("missing field `{name}`")))
        };
        let conversation_id = required("conversation_id")?.to_string();
        let speaker = required("speaker")?.to_string();
        if conversation_id.is_empty() || speaker.is_empty() {
            return Err(Error::parse(path, line, "empty conversation_id or speaker"));
        }
        let start = parse_time(path, line, "start", required("start")?)?;
        let end = parse_time(path, line, "end", required("end")?)?;
        check_span(path, line, start, end)?;
        let duration = match field("duration") {
            Some(d) if !d.trim().is_empty() => Some(parse_time(path, line, "duration", d)?),
            _ => None,
        };
        let text = field("text").filter(|t| !t.is_empty()).map(str::to_string);
        rows.push(Row {
            line,
            conversation_id,
            utterance: Utterance {
                speaker,
                start,
                end,
                text,
            },
            duration,
        });
    }
    Ok(rows)
}

fn json_time(path: &Path, line: u64, key: &str, v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| Error::parse(path, line, format!("`{key}` out of range"))),
        Value::String(s) => parse_time(path, line, key, s),
        _ => Err(Error::parse(path, line, format!("`{key}` must be a number"))),
    }
}

fn json_string(path: &Path, line: u64, key: &str, v: Option<&Value>) -> Result<String> {
    match v {
        Some(Value::String(s)) if !s.is_empty() => Ok(s.clone()),
        Some(Value::Number(n)) => Ok(n.to_string()),
        Some(_) => Err(Error::parse(path, line, format!("`{key}` must be a non-empty string"))),
        None => Err(Error::parse(path, line, format!("missing field `{key}`"))),
    }
}

fn jsonl_rows(path: &Path, text: &str) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i as u64 + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let obj: serde_json::Map<String, Value> =
            serde_json::from_str(raw).map_err(|e| Error::parse(path, line, e.to_string()))?;
        for key in obj.keys() {
            if !REQUIRED.contains(&key.as_str()) && !OPTIONAL.contains(&key.as_str()) {
                log::warn!("{}:{}: ignoring unknown key `{}`", path.display(), line, key);
            }
        }
        let conversation_id = json_string(path, line, "conversation_id", obj.get("conversation_id"))?;
        let speaker = json_string(path, line, "speaker", obj.get("speaker"))?;
        let get = |key: &str| {
            obj.get(key)
                .ok_or_else(|| Error::parse(path, line, format!("missing field `{key}`")))
        };
        let start = json_time(path, line, "start", get("start")?)?;
        let end = json_time(path, line, "end", get("end")?)?;
        check_span(path, line, start, end)?;
        let duration = match obj.get("duration") {
            None | Some(Value::Null) => None,
            Some(v) => Some(json_time(path, line, "duration", v)?),
        };
        let text = match obj.get("text") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) if s.is_empty() => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => return Err(Error::parse(path, line, "`text` must be a string")),
        };
        rows.push(Row {
            line,
            conversation_id,
            utterance: Utterance {
                speaker,
                start,
                end,
                text,
            },
            duration,
        });
    }
    Ok(rows)
}

fn assemble(path: &Path, rows: Vec<Row>, roles: Option<&RoleMap>) -> Result<Vec<Conversation>> {
    let mut grouped: BTreeMap<String, (Vec<Utterance>, Option<(f64, u64)>)> = BTreeMap::new();
    for row in rows {
        let entry = grouped.entry(row.conversation_id).or_default();
        if let Some(d) = row.duration {
            match entry.1 {
                Some((prev, _)) if prev != d => {
                    return Err(Error::parse(
                        path,
                        row.line,
                        format!("duration {d} conflicts with earlier duration {prev}"),
                    ))
                }
                _ => entry.1 = Some((d, row.line)),
            }
        }
        entry.0.push(row.utterance);
    }

    grouped
        .into_iter()
        .map(|(id, (utterances, duration))| {
            let mut conv = Conversation::new(id, utterances);
            if let Some((d, line)) = duration {
                if d < conv.duration {
                    return Err(Error::parse(
                        path,
                        line,
                        format!("duration {d} is shorter than the last utterance end {}", conv.duration),
                    ));
                }
                conv.duration = d;
            }
            if let Some(roles) = roles {
                conv = roles.apply(conv);
            }
            conv.ensure_valid()?;
            Ok(conv)
        })
        .collect()
}

/// Writes conversations in the transcript CSV layout. A trailing `duration`
/// column is emitted only when some conversation's duration differs from its
/// last utterance end.
pub fn write_transcripts_csv<W: Write>(convs: &[Conversation], out: W) -> Result<()> {
    let with_duration = convs.iter().any(|c| c.duration != c.max_end());
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::InvalidInput(format!("csv write failed: {e}"));
    let mut header = vec!["conversation_id", "speaker", "start", "end", "text"];
    if with_duration {
        header.push("duration");
    }
    w.write_record(&header).map_err(io)?;
    for conv in convs {
        for u in &conv.utterances {
            let mut rec = vec![
                conv.id.clone(),
                u.speaker.clone(),
                u.start.to_string(),
                u.end.to_string(),
                u.text.clone().unwrap_or_default(),
            ];
            if with_duration {
                rec.push(conv.duration.to_string());
            }
            w.write_record(&rec).map_err(io)?;
        }
    }
    w.flush().map_err(|e| Error::io("<output>", e))?;
    Ok(())
}
