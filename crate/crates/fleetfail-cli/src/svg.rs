//! Minimal self-contained SVG line charts. No external renderer, fonts, or
//! stylesheets: the output is a single `<svg>` element with inline styling,
//! suitable for dropping into a report or opening directly in a browser.
//! Output is deterministic — coordinates are formatted to fixed precision
//! and tick labels use the shortest round-trip float representation.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 620.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 350.0;

/// Line colors, assigned to series in order and cycled if exhausted.
const PALETTE: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];

/// One plotted line: a label for the legend and its (x, y) points.
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

/// Data range across all series, padded when flat so the scale is finite.
fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for v in values {
        min = min.min(v);
        max = max.max(v);
    }
    if min > max {
        // No points at all; draw an empty unit scale.
        return (0.0, 1.0);
    }
    if min == max {
        let pad = if min == 0.0 { 0.5 } else { min.abs() * 0.05 };
        return (min - pad, max + pad);
    }
    (min, max)
}

/// Renders a line chart of the given series as a complete SVG document.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let (x_min, x_max) = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (y_min, y_max) = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let px = |x: f64| LEFT + (x - x_min) / (x_max - x_min) * (RIGHT - LEFT);
    let py = |y: f64| BOTTOM - (y - y_min) / (y_max - y_min) * (BOTTOM - TOP);

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">"
    );
    let _ = writeln!(
        out,
        "  <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>"
    );
    let _ = writeln!(
        out,
        "  <text x=\"{:.2}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>",
        (LEFT + RIGHT) / 2.0,
        escape(title)
    );

    // Axes.
    let _ = writeln!(
        out,
        "  <line x1=\"{LEFT}\" y1=\"{TOP}\" x2=\"{LEFT}\" y2=\"{BOTTOM}\" stroke=\"#000000\"/>"
    );
    let _ = writeln!(
        out,
        "  <line x1=\"{LEFT}\" y1=\"{BOTTOM}\" x2=\"{RIGHT}\" y2=\"{BOTTOM}\" stroke=\"#000000\"/>"
    );

    // Extremal tick labels on each axis.
    let _ = writeln!(
        out,
        "  <text x=\"{LEFT}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
        BOTTOM + 16.0,
        x_min
    );
    let _ = writeln!(
        out,
        "  <text x=\"{RIGHT}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
        BOTTOM + 16.0,
        x_max
    );
    let _ = writeln!(
        out,
        "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
        LEFT - 6.0,
        BOTTOM + 4.0,
        y_min
    );
    let _ = writeln!(
        out,
        "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
        LEFT - 6.0,
        TOP + 4.0,
        y_max
    );

    // Axis titles.
    let _ = writeln!(
        out,
        "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
        (LEFT + RIGHT) / 2.0,
        BOTTOM + 38.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        "  <text x=\"16\" y=\"{:.2}\" text-anchor=\"middle\" \
         transform=\"rotate(-90 16 {:.2})\">{}</text>",
        (TOP + BOTTOM) / 2.0,
        (TOP + BOTTOM) / 2.0,
        escape(y_label)
    );

    // Series lines; single points are drawn as dots so they stay visible.
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if s.points.len() == 1 {
            let (x, y) = s.points[0];
            let _ = writeln!(
                out,
                "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{}\"/>",
                px(x),
                py(y),
                color
            );
        } else if !s.points.is_empty() {
            let coords: Vec<String> = s
                .points
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            let _ = writeln!(
                out,
                "  <polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>",
                coords.join(" "),
                color
            );
        }
    }

    // Legend, only when there is more than one series to tell apart.
    if series.len() > 1 {
        for (i, s) in series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let y = TOP + 14.0 + 16.0 * i as f64;
            let _ = writeln!(
                out,
                "  <line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" \
                 stroke=\"{}\" stroke-width=\"2\"/>",
                RIGHT - 130.0,
                RIGHT - 110.0,
                color
            );
            let _ = writeln!(
                out,
                "  <text x=\"{:.2}\" y=\"{:.2}\">{}</text>",
                RIGHT - 104.0,
                y + 4.0,
                escape(&s.label)
            );
        }
    }

    out.push_str("</svg>\n");
    out
}
