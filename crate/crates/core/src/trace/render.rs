//! Timing diagrams: one lane per instance, a green marker at each
//! activation's start, a red one at its end, a bar between them.

use std::fmt::Write;

use super::TraceRecord;
use crate::time::SimTime;

const LANE_HEIGHT: u64 = 28;
const PLOT_WIDTH: u64 = 640;
const TOP: u64 = 40;
const CHAR_WIDTH: u64 = 7;

/// Instances in order of first appearance in the trace.
fn lanes(records: &[TraceRecord]) -> Vec<&str> {
    let mut out: Vec<&str> = Vec::new();
    for r in records {
        if !out.contains(&r.instance.as_str()) {
            out.push(&r.instance);
        }
    }
    out
}

/// Axis end and tick step in ps: a 1-2-5 step giving at most ten ticks.
fn axis(records: &[TraceRecord]) -> (u64, u64) {
    let max = records.iter().map(|r| r.end.as_ps()).max().unwrap_or(0);
    if max == 0 {
        return (1_000, 1_000);
    }
    let mut magnitude = 1u64;
    loop {
        for factor in [1, 2, 5] {
            let step = magnitude.saturating_mul(factor);
            if max.div_ceil(step) <= 10 {
                return (max.div_ceil(step).saturating_mul(step), step);
            }
        }
        magnitude = magnitude.saturating_mul(10);
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

/// SVG 1.1 timing diagram. Output bytes depend only on `records`.
pub fn render_svg(records: &[TraceRecord]) -> String {
    let lanes = lanes(records);
    let (axis_end, step) = axis(records);
    let label_width = lanes.iter().map(|l| l.chars().count() as u64).max().unwrap_or(0) * CHAR_WIDTH + 20;
    let left = label_width.max(60);
    let width = left + PLOT_WIDTH + 40;
    let axis_y = TOP + LANE_HEIGHT * lanes.len() as u64 + 10;
    let height = axis_y + 40;
    let x = |t: SimTime| left as f64 + t.as_ps() as f64 * PLOT_WIDTH as f64 / axis_end as f64;
    let lane_y = |name: &str| {
        let i = lanes.iter().position(|l| *l == name).unwrap_or(0) as u64;
        TOP + LANE_HEIGHT * i + LANE_HEIGHT / 2
    };

    let mut svg = String::new();
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\" font-family=\"monospace\" font-size=\"12\">"
    );
    let _ = writeln!(svg, "  <rect x=\"0\" y=\"0\" width=\"{width}\" height=\"{height}\" fill=\"white\"/>");
    let _ = writeln!(svg, "  <text x=\"{left}\" y=\"20\">timing diagram (ns)</text>");

    let _ = writeln!(svg, "  <g class=\"lanes\">");
    for (i, lane) in lanes.iter().enumerate() {
        let y = TOP + LANE_HEIGHT * i as u64 + LANE_HEIGHT / 2;
        let _ = writeln!(svg, "    <text x=\"10\" y=\"{}\">{}</text>", y + 4, escape(lane));
        let _ = writeln!(
            svg,
            "    <line x1=\"{left}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"#dddddd\" stroke-dasharray=\"2,3\"/>",
            left + PLOT_WIDTH
        );
    }
    let _ = writeln!(svg, "  </g>");

    let _ = writeln!(svg, "  <g class=\"axis\">");
    let _ = writeln!(
        svg,
        "    <line x1=\"{left}\" y1=\"{axis_y}\" x2=\"{}\" y2=\"{axis_y}\" stroke=\"black\"/>",
        left + PLOT_WIDTH
    );
    let mut tick = 0;
    while tick <= axis_end {
        let tx = x(SimTime::from_ps(tick));
        let _ = writeln!(
            svg,
            "    <line x1=\"{tx:.2}\" y1=\"{axis_y}\" x2=\"{tx:.2}\" y2=\"{}\" stroke=\"black\"/>",
            axis_y + 5
        );
        let _ = writeln!(
            svg,
            "    <text x=\"{tx:.2}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
            axis_y + 18,
            SimTime::from_ps(tick).ns_string()
        );
        tick += step;
    }
    let _ = writeln!(svg, "    <text x=\"{}\" y=\"{}\" text-anchor=\"end\">ns</text>", left + PLOT_WIDTH, axis_y + 34);
    let _ = writeln!(svg, "  </g>");

    let _ = writeln!(svg, "  <g class=\"activations\">");
    for r in records {
        let y = lane_y(&r.instance);
        let (x0, x1) = (x(r.start), x(r.end));
        let _ = writeln!(
            svg,
            "    <g class=\"activation\" data-instance=\"{}\" data-activation=\"{}\">",
            escape(&r.instance),
            r.activation
        );
        let _ = writeln!(
            svg,
            "      <title>{} #{}: {}..{} ns {}</title>",
            escape(&r.instance),
            r.activation,
            r.start.ns_string(),
            r.end.ns_string(),
            r.status
        );
        let _ = writeln!(
            svg,
            "      <line class=\"bar\" x1=\"{x0:.2}\" y1=\"{y}\" x2=\"{x1:.2}\" y2=\"{y}\" stroke=\"#4a6fa5\" stroke-width=\"4\"/>"
        );
        let _ = writeln!(svg, "      <circle class=\"start\" cx=\"{x0:.2}\" cy=\"{y}\" r=\"5\" fill=\"green\"/>");
        let _ = writeln!(svg, "      <circle class=\"end\" cx=\"{x1:.2}\" cy=\"{y}\" r=\"5\" fill=\"red\"/>");
        let _ = writeln!(svg, "    </g>");
    }
    let _ = writeln!(svg, "  </g>");
    svg.push_str("</svg>\n");
    svg
}

const TEXT_COLUMNS: u64 = 60;

/// Terminal chart: `S` marks a start, `E` an end, `*` both in one column.
pub fn render_text(records: &[TraceRecord]) -> String {
    render_text_with(records, false)
}

/// [`render_text`], optionally with ANSI green starts and red ends.
pub fn render_text_with(records: &[TraceRecord], color: bool) -> String {
    let lanes = lanes(records);
    let (axis_end, _) = axis(records);
    let name_width = lanes.iter().map(|l| l.chars().count()).max().unwrap_or(0).max(4);
    let col = |t: SimTime| ((t.as_ps() as u128 * TEXT_COLUMNS as u128) / axis_end as u128) as usize;
    let mut out = String::new();
    for lane in &lanes {
        let mut row = vec![' '; TEXT_COLUMNS as usize + 1];
        for r in records.iter().filter(|r| r.instance == *lane) {
            let (a, b) = (col(r.start), col(r.end));
            for cell in row.iter_mut().take(b).skip(a + 1) {
                if *cell == ' ' {
                    *cell = '-';
                }
            }
            row[b] = if row[b] == 'S' || a == b { '*' } else { 'E' };
            row[a] = if row[a] == 'E' || a == b { '*' } else { 'S' };
        }
        let body: String = row
            .iter()
            .map(|&c| match (color, c) {
                (true, 'S') => "\x1b[32mS\x1b[0m".to_string(),
                (true, 'E') => "\x1b[31mE\x1b[0m".to_string(),
                _ => c.to_string(),
            })
            .collect();
        let _ = writeln!(out, "{lane:>name_width$} |{}|", body);
    }
    let end_label = format!("{} ns", SimTime::from_ps(axis_end).ns_string());
    let pad = (TEXT_COLUMNS as usize + 1).saturating_sub(end_label.len() + 1);
    let _ = writeln!(out, "{:>name_width$} |0{}{}|", "", " ".repeat(pad), end_label);
    out
}
