use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use talkshare::ingest::{parse_intervals, write_transcripts_csv};
use talkshare::stats::{interval_prf, quantile, Prf};
use talkshare::{synthesize, Blueprint};

use crate::output::{to_json, write_atomic};

pub fn synth(blueprint: &Path, out: &Path) -> Result<()> {
    let text = fs::read_to_string(blueprint).with_context(|| format!("reading {}", blueprint.display()))?;
    let bp = Blueprint::from_json_str(&text)?;
    let conv = synthesize(&bp)?;
    let mut buf = Vec::new();
    write_transcripts_csv(std::slice::from_ref(&conv), &mut buf)?;
    write_atomic(out, &buf)?;
    eprintln!("wrote {} utterances to {}", conv.utterances.len(), out.display());
    Ok(())
}

#[derive(Serialize)]
struct IntervalReport {
    speakers: std::collections::BTreeMap<String, Prf>,
    median_f1: Option<f64>,
    only_in_reference: Vec<String>,
    only_in_hypothesis: Vec<String>,
}

pub fn validate_intervals(reference: &Path, hypothesis: &Path, out: Option<&Path>) -> Result<()> {
    let r = parse_intervals(reference)?;
    let h = parse_intervals(hypothesis)?;
    let speakers: BTreeSet<&String> = r.keys().chain(h.keys()).collect();
    let empty = Vec::new();
    let per_speaker: std::collections::BTreeMap<String, Prf> = speakers
        .iter()
        .map(|s| {
            let prf = interval_prf(r.get(*s).unwrap_or(&empty), h.get(*s).unwrap_or(&empty));
            ((*s).clone(), prf)
        })
        .collect();
    let f1s: Vec<f64> = per_speaker.values().map(|p| p.f1).collect();
    let report = IntervalReport {
        median_f1: quantile(&f1s, 0.5),
        only_in_reference: r.keys().filter(|k| !h.contains_key(*k)).cloned().collect(),
        only_in_hypothesis: h.keys().filter(|k| !r.contains_key(*k)).cloned().collect(),
        speakers: per_speaker,
    };
    let json = to_json(&report)?;
    match out {
        Some(p) => write_atomic(p, &json),
        None => Ok(std::io::stdout().write_all(&json)?),
    }
}
