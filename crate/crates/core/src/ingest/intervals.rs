use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub type IntervalMap = BTreeMap<String, Vec<(f64, f64)>>;

/// Reads `speaker,start,end` rows (an optional header line is skipped) into
/// per-speaker interval lists sorted by start.
pub fn parse_intervals(path: impl AsRef<Path>) -> Result<IntervalMap> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_intervals_str_at(path, &text)
}

pub fn parse_intervals_str(text: &str) -> Result<IntervalMap> {
    parse_intervals_str_at(Path::new("<input>"), text)
}

fn parse_intervals_str_at(path: &Path, text: &str) -> Result<IntervalMap> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(text.as_bytes());
    let mut out = IntervalMap::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            Error::parse(path, line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != 3 {
            return Err(Error::parse(
                path,
                line,
                format!("expected 3 fields (speaker,start,end), found {}", record.len()),
            ));
        }
        let (speaker, start, end) = (record[0].trim(), record[1].trim(), record[2].trim());
        if i == 0 && speaker == "speaker" && start == "start" && end == "end" {
            continue;
        }
        let num = |name: &str, raw: &str| -> Result<f64> {
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::parse(path, line, format!("`{name}` is not a number: {raw:?}")))
        };
        let (s, e) = (num("start", start)?, num("end", end)?);
        if e <= s {
            return Err(Error::parse(path, line, format!("end {e} is not after start {s}")));
        }
        out.entry(speaker.to_string()).or_default().push((s, e));
    }
    for list in out.values_mut() {
        list.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    }
    Ok(out)
}
