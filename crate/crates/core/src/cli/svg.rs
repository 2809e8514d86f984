//! Standalone SVG rendering of an R² vector diagram.
//!
//! Output depends only on the input numbers: coordinates are printed with three
//! decimals and there are no timestamps or generated ids.

use std::fmt::Write;

use crate::experiments::R2Figure;

const SIZE: f64 = 480.0;
const CENTER: f64 = 240.0;
const RADIUS: f64 = 180.0;
const ORIGINAL: &str = "#1f5fbf";
const SCALED: &str = "#c62828";

fn num(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" { "0.000".into() } else { s }
}

/// Maps frame coordinates to the canvas; `y` points up.
fn to_canvas(v: [f64; 2]) -> (f64, f64) {
    (CENTER + RADIUS * v[0], CENTER - RADIUS * v[1])
}

fn segment(out: &mut String, v: [f64; 2], color: &str) {
    let (x, y) = to_canvas(v);
    let _ = writeln!(
        out,
        r#"  <line x1="{c}" y1="{c}" x2="{}" y2="{}" stroke="{color}" stroke-width="2"/>"#,
        num(x),
        num(y),
        c = num(CENTER)
    );
}

fn circle_tip(out: &mut String, v: [f64; 2]) {
    let (x, y) = to_canvas(v);
    let _ = writeln!(out, r#"  <circle cx="{}" cy="{}" r="5" fill="{ORIGINAL}"/>"#, num(x), num(y));
}

fn triangle_tip(out: &mut String, v: [f64; 2]) {
    let (x, y) = to_canvas(v);
    let len = (v[0] * v[0] + v[1] * v[1]).sqrt();
    let (dx, dy) = if len > 0.0 { (v[0] / len, -v[1] / len) } else { (1.0, 0.0) };
    let (px, py) = (-dy, dx);
    let tip = (x + 7.0 * dx, y + 7.0 * dy);
    let left = (x - 5.0 * dx + 5.0 * px, y - 5.0 * dy + 5.0 * py);
    let right = (x - 5.0 * dx - 5.0 * px, y - 5.0 * dy - 5.0 * py);
    let _ = writeln!(
        out,
        r#"  <polygon points="{},{} {},{} {},{}" fill="{SCALED}"/>"#,
        num(tip.0),
        num(tip.1),
        num(left.0),
        num(left.1),
        num(right.0),
        num(right.1)
    );
}

/// Unit circle, original vectors with round tips, scaled vectors with
/// triangular tips and a legend. The scaled series is omitted when empty.
pub fn render_r2(fig: &R2Figure<f64>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{s}" viewBox="0 0 {s} {s}">"#,
        s = SIZE
    );
    let _ = writeln!(out, r#"  <rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r##"  <circle cx="{c}" cy="{c}" r="{}" fill="none" stroke="#888888" stroke-dasharray="4 4"/>"##,
        num(RADIUS),
        c = num(CENTER)
    );
    let _ = writeln!(out, r#"  <g id="original">"#);
    for &v in &fig.original {
        segment(&mut out, v, ORIGINAL);
        circle_tip(&mut out, v);
    }
    let _ = writeln!(out, "  </g>");
    if !fig.scaled.is_empty() {
        let _ = writeln!(out, r#"  <g id="scaled">"#);
        for &(_, v) in &fig.scaled {
            segment(&mut out, v, SCALED);
            triangle_tip(&mut out, v);
        }
        let _ = writeln!(out, "  </g>");
    }
    let _ = writeln!(out, r#"  <g id="legend" font-family="sans-serif" font-size="14">"#);
    let _ = writeln!(out, r#"    <circle cx="20" cy="20" r="5" fill="{ORIGINAL}"/>"#);
    let _ = writeln!(out, r#"    <text x="32" y="25">original</text>"#);
    if !fig.scaled.is_empty() {
        let _ = writeln!(out, r#"    <polygon points="27,42 15,36 15,48" fill="{SCALED}"/>"#);
        let _ = writeln!(out, r#"    <text x="32" y="47">scaled</text>"#);
    }
    let _ = writeln!(out, "  </g>");
    let _ = writeln!(out, "</svg>");
    out
}
