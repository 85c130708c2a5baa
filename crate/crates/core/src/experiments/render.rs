//! CSV and SVG output. Numbers in the SVG are fixed to six decimals so the
//! file is byte-identical across runs.

use std::fmt::Write;

use super::{ContextEstimate, HistogramData};
use crate::geometry::IncidenceGeometry;

/// `line,operators,sign,mean,stderr`, one row per context.
pub fn contexts_csv(geom: &IncidenceGeometry, estimates: &[ContextEstimate]) -> String {
    let mut out = String::from("line,operators,sign,mean,stderr\n");
    for e in estimates {
        let ops = geom.line_operators(e.line).map(|o| o.to_string()).join(" ");
        let sign = geom.line(e.line).sign.value();
        writeln!(out, "{},{ops},{sign},{},{}", e.line, e.mean_product, e.stderr).unwrap();
    }
    out
}

/// `bin_lo,bin_hi,count`.
pub fn histogram_csv(h: &HistogramData) -> String {
    let mut out = String::from("bin_lo,bin_hi,count\n");
    for (i, c) in h.counts.iter().enumerate() {
        writeln!(out, "{:.6},{:.6},{c}", h.bin_edges[i], h.bin_edges[i + 1]).unwrap();
    }
    out
}

/// `index,label,chi,stderr,violates`, one row per member.
pub fn members_csv(h: &HistogramData) -> String {
    let mut out = String::from("index,label,chi,stderr,violates\n");
    for (i, m) in h.members.iter().enumerate() {
        writeln!(out, "{i},{},{},{},{}", m.label, m.chi, m.stderr, m.violates).unwrap();
    }
    out
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

/// Bar chart of the member χ values with the NCHV bound as a red rule.
pub fn histogram_svg(h: &HistogramData) -> String {
    let lo = h.bin_edges[0];
    let hi = *h.bin_edges.last().unwrap();
    let peak = h.counts.iter().copied().max().unwrap_or(0).max(1) as f64;
    let plot_w = W - LEFT - RIGHT;
    let plot_h = H - TOP - BOTTOM;
    let x = |v: f64| LEFT + (v - lo) / (hi - lo) * plot_w;
    let y = |c: f64| TOP + plot_h - c / peak * plot_h;

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W:.6}" height="{H:.6}" viewBox="0 0 {W:.6} {H:.6}">"#
    )
    .unwrap();
    writeln!(s, r#"<rect x="0" y="0" width="{W:.6}" height="{H:.6}" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<text x="{:.6}" y="{:.6}" font-family="sans-serif" font-size="14" text-anchor="middle">χ of {} {} in {} (L = {}, d = {})</text>"#,
        W / 2.0,
        TOP / 2.0 + 5.0,
        h.members.len(),
        h.family,
        escape(&h.ambient),
        h.lines,
        h.degree
    )
    .unwrap();
    for (i, &c) in h.counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let x0 = x(h.bin_edges[i]);
        let x1 = x(h.bin_edges[i + 1]);
        let top = y(c as f64);
        writeln!(
            s,
            r##"<rect x="{x0:.6}" y="{top:.6}" width="{:.6}" height="{:.6}" fill="#4a7ab5" stroke="#203a5a"/>"##,
            x1 - x0,
            TOP + plot_h - top
        )
        .unwrap();
    }
    let base = TOP + plot_h;
    writeln!(
        s,
        r#"<line x1="{LEFT:.6}" y1="{base:.6}" x2="{:.6}" y2="{base:.6}" stroke="black"/>"#,
        W - RIGHT
    )
    .unwrap();
    writeln!(s, r#"<line x1="{LEFT:.6}" y1="{TOP:.6}" x2="{LEFT:.6}" y2="{base:.6}" stroke="black"/>"#).unwrap();
    for (v, label) in [(lo, lo), (hi, hi)] {
        writeln!(
            s,
            r#"<text x="{:.6}" y="{:.6}" font-family="sans-serif" font-size="11" text-anchor="middle">{label:.6}</text>"#,
            x(v),
            base + 16.0
        )
        .unwrap();
    }
    writeln!(
        s,
        r#"<text x="{:.6}" y="{:.6}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
        LEFT - 6.0,
        TOP + 4.0,
        peak as u64
    )
    .unwrap();
    let bound = h.nchv_bound as f64;
    writeln!(
        s,
        r#"<line x1="{0:.6}" y1="{TOP:.6}" x2="{0:.6}" y2="{base:.6}" stroke="red" stroke-width="2"/>"#,
        x(bound)
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="{:.6}" y="{:.6}" font-family="sans-serif" font-size="11" fill="red">NCHV {bound:.6}</text>"#,
        x(bound) + 4.0,
        TOP + 12.0
    )
    .unwrap();
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
