use std::collections::BTreeSet;
use std::path::Path;

use anyhow::{bail, Context, Result};

use talkshare::ingest::parse_transcripts_with_roles;
use talkshare::{analyze, Error, TranscriptFormat};

use crate::output::{file_stem, to_json, OutputSet, RunManifest};
use crate::table::{assign_quartiles, load_setup, summary_csv, SummaryRow};
use crate::{ConfigArgs, FormatArg};

pub fn run(
    transcripts: &Path,
    format: Option<FormatArg>,
    args: &ConfigArgs,
    (k, l, m): (Option<f64>, Option<f64>, Option<f64>),
    out_dir: &Path,
) -> Result<()> {
    let (mut cfg, roles) = load_setup(args)?;
    if let Some(k) = k {
        cfg.window.k_seconds = k;
    }
    if let Some(l) = l {
        cfg.window.l_seconds = l;
    }
    if let Some(m) = m {
        cfg.window.dominance_threshold = m;
    }
    cfg.validate()?;

    let format = match format {
        Some(FormatArg::Csv) => TranscriptFormat::Csv,
        Some(FormatArg::Jsonl) => TranscriptFormat::Jsonl,
        None => TranscriptFormat::from_path(transcripts),
    };
    let convs = parse_transcripts_with_roles(transcripts, format, roles.as_ref())?;
    if convs.is_empty() {
        log::warn!("{}: no conversations", transcripts.display());
    }
    let expected_primary = roles.as_ref().and_then(|r| r.expected_primary.as_deref());

    // Everything is computed before anything is written.
    let mut outputs = OutputSet::new(out_dir);
    let mut rows = Vec::with_capacity(convs.len());
    let mut stems = BTreeSet::new();
    for conv in &convs {
        match analyze(conv, &cfg, expected_primary) {
            Ok(report) => {
                let stem = file_stem(&report.id);
                if !stems.insert(stem.clone()) {
                    bail!("conversation ids collide on report file name `{stem}.json`");
                }
                rows.push(SummaryRow::analyzed(&report, conv.duration));
                outputs.add(format!("reports/{stem}.json"), to_json(&report)?);
            }
            Err(Error::TooShort { duration, window }) => {
                log::warn!("{}: skipped, {duration} s is shorter than one {window} s window", conv.id);
                rows.push(SummaryRow::skipped(
                    &conv.id,
                    conv.duration,
                    format!("shorter than one window ({duration} s < {window} s)"),
                ));
            }
            Err(e) => return Err(e).with_context(|| format!("conversation `{}`", conv.id)),
        }
    }
    assign_quartiles(&mut rows, cfg.quartile_direction);
    outputs.add("summary.csv", summary_csv(&rows)?);

    let mut inputs = vec![transcripts];
    inputs.extend(args.config.as_deref());
    inputs.extend(args.roles.as_deref());
    let manifest = RunManifest::new("analyze", &cfg, &inputs)?;
    outputs.commit(manifest)?;

    let analyzed = rows.iter().filter(|r| r.status == "ok").count();
    eprintln!(
        "analyzed {analyzed} of {} conversations into {}",
        rows.len(),
        out_dir.display()
    );
    Ok(())
}
