//! SVG and terminal renderings of regime sequences.
//!
//! Windows overlap in time, but cells are drawn abutting, one per window.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dynamics::DynamicsReport;
use crate::model::{Composition, Regime, WindowConfig, WindowResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StripStyle {
    pub cell_width: f64,
    pub cell_height: f64,
    pub blue: String,
    pub red: String,
    pub gray: String,
    /// Opacity at the dominance threshold and at full dominance.
    pub intensity_range: (f64, f64),
    /// Vertical space between rows of a corpus grid.
    pub row_gap: f64,
    pub pie_radius: f64,
}

impl Default for StripStyle {
    fn default() -> Self {
        Self {
            cell_width: 12.0,
            cell_height: 24.0,
            blue: "#1f4e9c".into(),
            red: "#c0392b".into(),
            gray: "#9e9e9e".into(),
            intensity_range: (0.30, 1.00),
            row_gap: 4.0,
            pie_radius: 60.0,
        }
    }
}

impl StripStyle {
    fn color(&self, regime: Regime) -> &str {
        match regime {
            Regime::Blue => &self.blue,
            Regime::Red => &self.red,
            Regime::Gray => &self.gray,
        }
    }
}

/// Rounds to 4 decimals and drops trailing zeros.
fn num(v: f64) -> String {
    let s = format!("{:.4}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn svg_open(out: &mut String, width: f64, height: f64) {
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
        w = num(width),
        h = num(height)
    );
}

/// Opacity of a window cell: linear in the dominant party's share between its
/// threshold and 1. Gray cells are drawn at full opacity.
pub fn cell_opacity(window: &WindowResult, config: &WindowConfig, style: &StripStyle) -> f64 {
    let (lo, hi) = style.intensity_range;
    match (&window.label, &window.dominant_party) {
        (Regime::Gray, _) | (_, None) => 1.0,
        (_, Some(party)) => {
            let t = config.threshold_for(party);
            if t >= 1.0 {
                return hi;
            }
            let x = ((window.dominance_fraction - t) / (1.0 - t)).clamp(0.0, 1.0);
            lo + x * (hi - lo)
        }
    }
}

fn strip_cells(out: &mut String, report: &DynamicsReport, style: &StripStyle, y: f64) {
    for (i, w) in report.regimes.windows.iter().enumerate() {
        let _ = writeln!(
            out,
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" fill-opacity=\"{}\"/>",
            num(i as f64 * style.cell_width),
            num(y),
            num(style.cell_width),
            num(style.cell_height),
            escape(style.color(w.label)),
            num(cell_opacity(w, &report.regimes.config_used, style)),
        );
    }
}

/// One cell per window, left to right.
pub fn render_strip(report: &DynamicsReport, style: &StripStyle) -> String {
    let n = report.regimes.windows.len();
    let mut out = String::new();
    svg_open(&mut out, n as f64 * style.cell_width, style.cell_height);
    let _ = writeln!(out, "<title>{}</title>", escape(&report.id));
    strip_cells(&mut out, report, style, 0.0);
    out.push_str("</svg>\n");
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct PieWedge {
    pub regime: Regime,
    /// Degrees clockwise from 12 o'clock.
    pub start_deg: f64,
    pub sweep_deg: f64,
    /// Rounded half-up, so labels may not sum to 100.
    pub percent: u32,
}

/// Non-empty wedges in blue, red, gray order.
pub fn pie_wedges(c: &Composition) -> Vec<PieWedge> {
    let mut start = 0.0;
    let mut out = Vec::new();
    for regime in [Regime::Blue, Regime::Red, Regime::Gray] {
        let f = c.get(regime);
        if f <= 0.0 {
            continue;
        }
        let sweep = 360.0 * f;
        out.push(PieWedge {
            regime,
            start_deg: start,
            sweep_deg: sweep,
            percent: (f * 100.0 + 0.5).floor() as u32,
        });
        start += sweep;
    }
    out
}

fn polar(cx: f64, cy: f64, r: f64, deg: f64) -> (f64, f64) {
    let rad = (deg - 90.0).to_radians();
    (cx + r * rad.cos(), cy + r * rad.sin())
}

pub fn render_pie(c: &Composition, style: &StripStyle) -> String {
    let r = style.pie_radius;
    let (cx, cy) = (r, r);
    let mut out = String::new();
    svg_open(&mut out, 2.0 * r, 2.0 * r);
    for w in pie_wedges(c) {
        let fill = escape(style.color(w.regime));
        if w.sweep_deg >= 360.0 - 1e-9 {
            let _ = writeln!(
                out,
                "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\"/>",
                num(cx),
                num(cy),
                num(r),
                fill
            );
        } else {
            let (x0, y0) = polar(cx, cy, r, w.start_deg);
            let (x1, y1) = polar(cx, cy, r, w.start_deg + w.sweep_deg);
            let large = if w.sweep_deg > 180.0 { 1 } else { 0 };
            let _ = writeln!(
                out,
                "<path d=\"M {} {} L {} {} A {} {} 0 {} 1 {} {} Z\" fill=\"{}\"/>",
                num(cx),
                num(cy),
                num(x0),
                num(y0),
                num(r),
                num(r),
                large,
                num(x1),
                num(y1),
                fill
            );
        }
        let (tx, ty) = polar(cx, cy, 0.6 * r, w.start_deg + w.sweep_deg / 2.0);
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" dominant-baseline=\"middle\" font-size=\"{}\" fill=\"#ffffff\">{}%</text>",
            num(tx),
            num(ty),
            num(r / 5.0),
            w.percent
        );
    }
    out.push_str("</svg>\n");
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridSort {
    /// Most imbalanced first; ties by id.
    #[default]
    ImbalanceDesc,
    Id,
}

pub fn sort_reports(reports: &[DynamicsReport], sort: GridSort) -> Vec<&DynamicsReport> {
    let mut rows: Vec<&DynamicsReport> = reports.iter().collect();
    match sort {
        GridSort::Id => rows.sort_by(|a, b| a.id.cmp(&b.id)),
        GridSort::ImbalanceDesc => rows.sort_by(|a, b| {
            b.imbalance
                .value
                .total_cmp(&a.imbalance.value)
                .then_with(|| a.id.cmp(&b.id))
        }),
    }
    rows
}

/// One strip per conversation, stacked top to bottom.
pub fn render_corpus_grid(reports: &[DynamicsReport], sort: GridSort, style: &StripStyle) -> String {
    let rows = sort_reports(reports, sort);
    let max_cells = rows
        .iter()
        .map(|r| r.regimes.windows.len())
        .max()
        .unwrap_or(0);
    let pitch = style.cell_height + style.row_gap;
    let mut out = String::new();
    svg_open(&mut out, max_cells as f64 * style.cell_width, rows.len() as f64 * pitch);
    for (i, report) in rows.iter().enumerate() {
        let _ = writeln!(
            out,
            "<g><title>{} ({})</title>",
            escape(&report.id),
            num(report.imbalance.value)
        );
        strip_cells(&mut out, report, style, i as f64 * pitch);
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

/// Color is on unless `NO_COLOR` is set to a non-empty value.
pub fn color_from_env() -> bool {
    std::env::var_os("NO_COLOR").is_none_or(|v| v.is_empty())
}

/// One block per window: ANSI-colored when `color`, else `B`/`R`/`G`.
pub fn render_terminal(report: &DynamicsReport, color: bool) -> String {
    let mut out = String::new();
    for w in &report.regimes.windows {
        if color {
            let sgr = match w.label {
                Regime::Blue => "34",
                Regime::Red => "31",
                Regime::Gray => "90",
            };
            let _ = write!(out, "\x1b[{sgr}m\u{2588}");
        } else {
            out.push(w.label.letter());
        }
    }
    if color && !report.regimes.windows.is_empty() {
        out.push_str("\x1b[0m");
    }
    out
}
