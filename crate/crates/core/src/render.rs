//! Chart rendering: self-contained SVG and a fixed-width text grid.
//!
//! Stems run along x, filtration `s` along y. `h₀` is vertical, `h₁` has
//! slope 1 and `h₂` slope 1/3. Flagged classes and lines touching them are
//! dashed.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::chart::{ExtChart, HOp, TRUNCATION_FLAG};

const CELL: f64 = 40.0;
const MARGIN: f64 = 40.0;
const DOT: f64 = 3.5;
const SPREAD: f64 = 8.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn unescape(s: &str) -> String {
    s.replace("&quot;", "\"")
        .replace("&gt;", ">")
        .replace("&lt;", "<")
        .replace("&amp;", "&")
}

/// Extent of the drawing: the chart's window, or its classes when unset.
fn extent(chart: &ExtChart) -> (u32, u32) {
    match chart.window {
        Some(w) => (w.max_stem, w.max_s),
        None => (chart.max_stem(), chart.max_s()),
    }
}

/// Pixel position of every class; classes sharing a bidegree are spread
/// horizontally.
fn positions(chart: &ExtChart, max_s: u32) -> BTreeMap<String, (f64, f64)> {
    let mut out = BTreeMap::new();
    for (stem, s) in chart.bidegrees() {
        let at = chart.at(stem, s);
        let n = at.len() as f64;
        for (k, &i) in at.iter().enumerate() {
            let dx = (k as f64 - (n - 1.0) / 2.0) * SPREAD;
            let x = MARGIN + stem as f64 * CELL + dx;
            let y = MARGIN + (max_s - s.min(max_s)) as f64 * CELL;
            out.insert(chart.classes[i].name.clone(), (x, y));
        }
    }
    out
}

/// Renders a chart as a standalone SVG document.
///
/// Each class is one `<circle class="dot">` carrying `data-name`, `data-s`
/// and `data-stem`, so the dot multiset can be recovered by
/// [`parse_svg_dots`].
pub fn render_svg(chart: &ExtChart) -> String {
    let (max_stem, max_s) = extent(chart);
    let width = 2.0 * MARGIN + max_stem as f64 * CELL;
    let height = 2.0 * MARGIN + max_s as f64 * CELL;
    let pos = positions(chart, max_s);
    let flagged = |name: &str| {
        chart
            .class(name)
            .is_some_and(|c| c.has_flag(TRUNCATION_FLAG))
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
    );
    out.push_str(
        "<style>.axis{stroke:#000;stroke-width:1}.tick{font:10px sans-serif}\
.line{stroke:#000;stroke-width:1}.dashed{stroke-dasharray:3,3}\
.dot{fill:#000}.dot.flagged{fill:#fff;stroke:#000;stroke-dasharray:2,1}\
.annotation{stroke:#777;stroke-dasharray:4,3}</style>\n",
    );
    let y0 = MARGIN + max_s as f64 * CELL;
    let _ = writeln!(
        out,
        "<line class=\"axis\" x1=\"{MARGIN}\" y1=\"{y0}\" x2=\"{}\" y2=\"{y0}\"/>",
        width - MARGIN / 2.0
    );
    let _ = writeln!(
        out,
        "<line class=\"axis\" x1=\"{MARGIN}\" y1=\"{y0}\" x2=\"{MARGIN}\" y2=\"{}\"/>",
        MARGIN / 2.0
    );
    for stem in 0..=max_stem {
        let x = MARGIN + stem as f64 * CELL;
        let _ = writeln!(
            out,
            "<text class=\"tick\" x=\"{x}\" y=\"{}\" text-anchor=\"middle\">{stem}</text>",
            y0 + 16.0
        );
    }
    for s in 0..=max_s {
        let y = MARGIN + (max_s - s) as f64 * CELL;
        let _ = writeln!(
            out,
            "<text class=\"tick\" x=\"{}\" y=\"{}\" text-anchor=\"end\">{s}</text>",
            MARGIN - 8.0,
            y + 4.0
        );
    }
    for a in &chart.annotations {
        let p = |(stem, s): (u32, u32)| {
            (
                MARGIN + stem as f64 * CELL,
                MARGIN + (max_s as f64 - s as f64) * CELL,
            )
        };
        let ((x1, y1), (x2, y2)) = (p(a.from), p(a.to));
        let _ = writeln!(
            out,
            "<line class=\"annotation\" data-kind=\"{}\" x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\"/>",
            escape(&a.kind)
        );
    }
    for p in &chart.products {
        let (Some(&(x1, y1)), Some(&(x2, y2))) = (pos.get(&p.from), pos.get(&p.to)) else {
            continue;
        };
        let dashed = if flagged(&p.from) || flagged(&p.to) {
            " dashed"
        } else {
            ""
        };
        let _ = writeln!(
            out,
            "<line class=\"line {op}{dashed}\" x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\"/>",
            op = p.op
        );
    }
    for c in &chart.classes {
        let Some(&(x, y)) = pos.get(&c.name) else {
            continue;
        };
        let class = if c.has_flag(TRUNCATION_FLAG) {
            "dot flagged"
        } else {
            "dot"
        };
        let _ = writeln!(
            out,
            "<circle class=\"{class}\" cx=\"{x}\" cy=\"{y}\" r=\"{DOT}\" data-name=\"{}\" data-s=\"{}\" data-stem=\"{}\"><title>{}</title></circle>",
            escape(&c.name),
            c.s,
            c.stem(),
            escape(&c.name)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn attribute(tag: &str, name: &str) -> Option<String> {
    let key = format!(" {name}=\"");
    let start = tag.find(&key)? + key.len();
    let end = tag[start..].find('"')? + start;
    Some(unescape(&tag[start..end]))
}

/// Recovers `(name, s, stem)` of every dot in an SVG made by [`render_svg`].
pub fn parse_svg_dots(svg: &str) -> Vec<(String, u32, u32)> {
    let mut out = Vec::new();
    for piece in svg.split("<circle").skip(1) {
        let tag = &piece[..piece.find('>').unwrap_or(piece.len())];
        let Some(class) = attribute(tag, "class") else {
            continue;
        };
        if !class.split_whitespace().any(|c| c == "dot") {
            continue;
        }
        let name = attribute(tag, "data-name").unwrap_or_default();
        let s = attribute(tag, "data-s")
            .and_then(|v| v.parse().ok())
            .unwrap_or(0);
        let stem = attribute(tag, "data-stem")
            .and_then(|v| v.parse().ok())
            .unwrap_or(0);
        out.push((name, s, stem));
    }
    out
}

const COL: usize = 5;
const LABEL: usize = 4;

/// Renders a chart as a text grid: `o` for one class, a digit for several,
/// `*` marking truncation-sensitive cells; `|` and `/` below a row show `h₀` and `h₁`
/// products into it. Width is `4 + 5 × (max_stem + 1)` columns.
pub fn render_ascii(chart: &ExtChart) -> String {
    let (max_stem, max_s) = extent(chart);
    let cols = LABEL + COL * (max_stem as usize + 1);
    let mut lines = Vec::new();
    let has_product = |op: HOp, stem: u32, s: u32| -> bool {
        s <= max_s && stem + op.stem_shift() <= max_stem && chart.product_rank(op, stem, s) > 0
    };
    for s in (0..=max_s).rev() {
        let mut row = vec![' '; cols];
        for (i, ch) in format!("{s:>3} ").chars().enumerate() {
            row[i] = ch;
        }
        for stem in 0..=max_stem {
            let at = chart.at(stem, s);
            let c = LABEL + COL * stem as usize + 2;
            row[c] = match at.len() {
                0 => '.',
                1 => 'o',
                n if n < 10 => char::from_digit(n as u32, 10).expect("digit"),
                _ => '#',
            };
            if at
                .iter()
                .any(|&i| chart.classes[i].has_flag(TRUNCATION_FLAG))
            {
                row[c + 1] = '*';
            }
        }
        lines.push(row.into_iter().collect::<String>().trim_end().to_string());
        if s > 0 {
            let mut links = vec![' '; cols];
            for stem in 0..=max_stem {
                let c = LABEL + COL * stem as usize + 2;
                if has_product(HOp::H0, stem, s - 1) {
                    links[c] = '|';
                }
                if stem > 0 && has_product(HOp::H1, stem - 1, s - 1) {
                    links[c - 2] = '/';
                }
            }
            lines.push(links.into_iter().collect::<String>().trim_end().to_string());
        }
    }
    let mut axis = " ".repeat(LABEL);
    for stem in 0..=max_stem {
        axis.push_str(&format!("{stem:^COL$}"));
    }
    lines.push(axis.trim_end().to_string());
    let mut out = lines.join("\n");
    out.push('\n');
    out
}
