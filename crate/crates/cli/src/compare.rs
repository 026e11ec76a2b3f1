use std::collections::BTreeSet;
use std::path::Path;

use anyhow::{bail, Result};
use serde::Serialize;

use talkshare::stats::{
    bootstrap_ci, fightin_words, group_summary, mann_whitney_u, write_fightin_words_csv,
    BootstrapStatistic, FightinWordsEntry, GroupSummary, TestResult,
};

use crate::filter::Filter;
use crate::output::{to_json, OutputSet, RunManifest};
use crate::table::{load_joined, load_setup, SpeakerRow};
use crate::{CommentField, ConfigArgs};

const RESAMPLES: usize = 2000;

pub struct Request<'a> {
    pub summary: &'a Path,
    pub survey: &'a Path,
    pub group_a: &'a str,
    pub group_b: &'a str,
    pub field: CommentField,
    pub cfg: &'a ConfigArgs,
    pub enjoyment_max: u32,
    pub out_dir: &'a Path,
}

#[derive(Serialize)]
struct GroupReport {
    filter: String,
    speakers: usize,
    conversations: usize,
    comments: usize,
    enjoyment: GroupSummary,
    mean_ci95: (f64, f64),
    pct_max_ci95: (f64, f64),
}

#[derive(Serialize)]
struct Comparison {
    field: &'static str,
    group_a: GroupReport,
    group_b: GroupReport,
    mann_whitney: TestResult,
    ngram_max: usize,
    alpha: f64,
    phrases_a: &'static str,
    phrases_b: &'static str,
}

fn comment(row: &SpeakerRow, field: CommentField) -> Option<&str> {
    let text = match field {
        CommentField::CommentPositive => row.record.comment_positive.as_deref(),
        CommentField::CommentNegative => row.record.comment_negative.as_deref(),
    };
    text.filter(|t| !t.trim().is_empty())
}

fn group_report(
    filter: &Filter,
    rows: &[&SpeakerRow],
    comments: usize,
    max: u32,
    seed: u64,
) -> Result<GroupReport> {
    let scores: Vec<u32> = rows.iter().map(|r| r.record.enjoyment).collect();
    let values: Vec<f64> = scores.iter().map(|&s| s as f64).collect();
    Ok(GroupReport {
        filter: filter.text().to_string(),
        speakers: rows.len(),
        conversations: rows
            .iter()
            .map(|r| r.record.conversation_id.as_str())
            .collect::<BTreeSet<_>>()
            .len(),
        comments,
        enjoyment: group_summary(&scores, max)?,
        mean_ci95: bootstrap_ci(&values, BootstrapStatistic::Mean, 0.95, RESAMPLES, seed)?,
        pct_max_ci95: bootstrap_ci(
            &values,
            BootstrapStatistic::ProportionMax(max as f64),
            0.95,
            RESAMPLES,
            seed,
        )?,
    })
}

fn phrases_csv(entries: &[FightinWordsEntry]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_fightin_words_csv(entries, &mut buf)?;
    Ok(buf)
}

pub fn run(req: Request<'_>) -> Result<()> {
    let (cfg, roles) = load_setup(req.cfg)?;
    let filter_a = Filter::parse(req.group_a)?;
    let filter_b = Filter::parse(req.group_b)?;
    let rows = load_joined(req.summary, req.survey, roles.as_ref(), req.enjoyment_max)?;
    let Some(first) = rows.first() else {
        bail!("no survey respondent belongs to an analyzed conversation");
    };
    filter_a.check_columns(first.fields.keys())?;
    filter_b.check_columns(first.fields.keys())?;

    let select = |f: &Filter| -> Result<Vec<&SpeakerRow>> {
        let mut out = Vec::new();
        for row in &rows {
            if f.matches(&row.fields)? {
                out.push(row);
            }
        }
        if out.is_empty() {
            bail!("filter `{}` selects no speakers", f.text());
        }
        Ok(out)
    };
    let a = select(&filter_a)?;
    let b = select(&filter_b)?;

    let docs = |g: &[&SpeakerRow]| -> Vec<String> {
        g.iter().filter_map(|r| comment(r, req.field)).map(str::to_string).collect()
    };
    let (docs_a, docs_b) = (docs(&a), docs(&b));
    let fw = &cfg.fightin_words;
    let (a_vs_b, b_vs_a) = if docs_a.is_empty() || docs_b.is_empty() {
        log::warn!("a group has no comments in the chosen field; phrase lists are empty");
        (Vec::new(), Vec::new())
    } else {
        (
            fightin_words(&docs_a, &docs_b, fw.ngram_max, fw.alpha)?,
            fightin_words(&docs_b, &docs_a, fw.ngram_max, fw.alpha)?,
        )
    };

    let enjoyment = |g: &[&SpeakerRow]| -> Vec<f64> { g.iter().map(|r| r.record.enjoyment as f64).collect() };
    let comparison = Comparison {
        field: match req.field {
            CommentField::CommentPositive => "comment_positive",
            CommentField::CommentNegative => "comment_negative",
        },
        group_a: group_report(&filter_a, &a, docs_a.len(), req.enjoyment_max, cfg.rng_seed)?,
        group_b: group_report(&filter_b, &b, docs_b.len(), req.enjoyment_max, cfg.rng_seed)?,
        mann_whitney: mann_whitney_u(&enjoyment(&a), &enjoyment(&b))?,
        ngram_max: fw.ngram_max,
        alpha: fw.alpha,
        phrases_a: "phrases_a_vs_b.csv",
        phrases_b: "phrases_b_vs_a.csv",
    };

    let mut outputs = OutputSet::new(req.out_dir);
    outputs.add(comparison.phrases_a, phrases_csv(&a_vs_b)?);
    outputs.add(comparison.phrases_b, phrases_csv(&b_vs_a)?);
    outputs.add("comparison.json", to_json(&comparison)?);
    let mut inputs = vec![req.summary, req.survey];
    inputs.extend(req.cfg.config.as_deref());
    inputs.extend(req.cfg.roles.as_deref());
    outputs.commit(RunManifest::new("compare", &cfg, &inputs)?)?;
    eprintln!(
        "group A: {} speakers, group B: {} speakers, Mann-Whitney p = {:.4}",
        a.len(),
        b.len(),
        comparison.mann_whitney.p_value
    );
    Ok(())
}
