use std::fmt::Write as _;

use super::SynthError;
use crate::ingest::Series;

const MARGIN: f64 = 40.0;
const MIN_SIDE: u32 = 64;

fn escape(text: &str) -> String {
    text.chars()
        .map(|c| match c {
            '&' => "&amp;".to_string(),
            '<' => "&lt;".to_string(),
            '>' => "&gt;".to_string(),
            '"' => "&quot;".to_string(),
            '\'' => "&apos;".to_string(),
            c => c.to_string(),
        })
        .collect()
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

/// Renders the series as an SVG 1.1 line plot: one polyline with a vertex per
/// finite point (NaN points are skipped), axes fitted to the data range.
pub fn render_plot(series: &Series, width: u32, height: u32) -> Result<Vec<u8>, SynthError> {
    if width < MIN_SIDE || height < MIN_SIDE {
        return Err(SynthError::BadDimensions { width, height });
    }
    let (w, h) = (f64::from(width), f64::from(height));
    // shrink the margin on small canvases so the plot area stays positive
    let margin = MARGIN.min(w / 4.0).min(h / 4.0);
    let points: Vec<(f64, f64)> = series
        .x()
        .iter()
        .zip(series.y())
        .filter(|(_, y)| y.is_finite())
        .map(|(&x, &y)| (x, y))
        .collect();
    let (x_lo, x_hi) = range(points.iter().map(|p| p.0));
    let (y_lo, y_hi) = range(points.iter().map(|p| p.1));
    let px = |x: f64| margin + (x - x_lo) / (x_hi - x_lo) * (w - 2.0 * margin);
    let py = |y: f64| h - margin - (y - y_lo) / (y_hi - y_lo) * (h - 2.0 * margin);

    let label = escape(series.label());
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}" role="img" aria-label="Plot of {label}">"#
    );
    let _ = writeln!(svg, "<title>{label}</title>");
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>"#);
    let (left, right, top, bottom) = (margin, w - margin, margin, h - margin);
    let _ = writeln!(
        svg,
        r#"<line x1="{left:.2}" y1="{bottom:.2}" x2="{right:.2}" y2="{bottom:.2}" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{left:.2}" y1="{top:.2}" x2="{left:.2}" y2="{bottom:.2}" stroke="black"/>"#
    );
    let ticks = [
        (left, bottom + 14.0, "start", x_lo),
        (right, bottom + 14.0, "end", x_hi),
        (left - 4.0, bottom, "end", y_lo),
        (left - 4.0, top + 10.0, "end", y_hi),
    ];
    for (x, y, anchor, value) in ticks {
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{y:.2}" font-size="10" text-anchor="{anchor}">{value:.4}</text>"#
        );
    }
    let vertices: Vec<String> = points
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
        .collect();
    let _ = writeln!(
        svg,
        r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{}"/>"#,
        vertices.join(" ")
    );
    svg.push_str("</svg>\n");
    Ok(svg.into_bytes())
}
