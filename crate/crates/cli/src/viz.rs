use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};

use talkshare::viz::{
    color_from_env, render_corpus_grid, render_pie, render_strip, render_terminal, sort_reports,
    GridSort, StripStyle,
};
use talkshare::DynamicsReport;

use crate::output::{file_stem, write_atomic};
use crate::{usage, SortArg, VizMode};

fn load_report(path: &Path) -> Result<DynamicsReport> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{}: not a conversation report", path.display()))
}

/// Every `*.json` report in `dir`, in file-name order.
fn load_dir(dir: &Path) -> Result<Vec<DynamicsReport>> {
    let mut paths: Vec<_> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        bail!("{}: no report files", dir.display());
    }
    paths.iter().map(|p| load_report(p)).collect()
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

pub fn run(
    report: Option<&Path>,
    reports_dir: Option<&Path>,
    mode: VizMode,
    sort: SortArg,
    out: Option<&Path>,
) -> Result<()> {
    let single = report.is_some();
    let reports = match (report, reports_dir) {
        (Some(p), _) => vec![load_report(p)?],
        (None, Some(d)) => load_dir(d)?,
        (None, None) => return Err(usage("give --report or --reports-dir")),
    };
    let sort = match sort {
        SortArg::Imbalance => GridSort::ImbalanceDesc,
        SortArg::Id => GridSort::Id,
    };
    let style = StripStyle::default();

    match mode {
        VizMode::Term => {
            let color = out.is_none() && color_from_env();
            let text: String = sort_reports(&reports, sort)
                .into_iter()
                .map(|r| format!("{:<24} {}\n", r.id, render_terminal(r, color)))
                .collect();
            emit(out, &text)
        }
        VizMode::Grid => emit(out, &render_corpus_grid(&reports, sort, &style)),
        VizMode::Strip | VizMode::Pie => {
            let render = |r: &DynamicsReport| match mode {
                VizMode::Strip => render_strip(r, &style),
                _ => render_pie(&r.composition, &style),
            };
            if single {
                return emit(out, &render(&reports[0]));
            }
            let Some(dir) = out else {
                return Err(usage("--out must name a directory when rendering a reports directory"));
            };
            let suffix = if mode == VizMode::Strip { "strip" } else { "pie" };
            for r in &reports {
                write_atomic(&dir.join(format!("{}.{suffix}.svg", file_stem(&r.id))), render(r).as_bytes())?;
            }
            eprintln!("wrote {} files to {}", reports.len(), dir.display());
            Ok(())
        }
    }
}
