//! Static SVG heatmap of a probability map. No-data cells get a hatch
//! pattern so they cannot be misread as zero probability.

use impactrig::model::InjuryClass;
use impactrig::records::{BinIndex, ProbabilityMap};
use std::fmt::Write as _;

const CELL_W: f64 = 112.0;
const CELL_H: f64 = 54.0;
const LEFT: f64 = 118.0;
const TOP: f64 = 64.0;
const BOTTOM: f64 = 58.0;
const RIGHT: f64 = 16.0;

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Light grey at p = 0 to deep red at p = 1.
fn fill(p: f64) -> String {
    let p = p.clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64| (a + (b - a) * p).round() as u8;
    format!("#{:02x}{:02x}{:02x}", lerp(247.0, 178.0), lerp(247.0, 24.0), lerp(247.0, 43.0))
}

fn text_color(p: f64) -> &'static str {
    if p > 0.55 {
        "#ffffff"
    } else {
        "#333333"
    }
}

/// Render the in-grid cells (overflow bins are export-only) colored by the
/// probability of an injury strictly more severe than `tolerated`.
pub fn render_map(map: &ProbabilityMap, tolerated: InjuryClass) -> String {
    let rows = map.mass_grid.len();
    let cols = map.velocity_bins.count;
    let width = LEFT + cols as f64 * CELL_W + RIGHT;
    let height = TOP + rows as f64 * CELL_H + BOTTOM;

    let impactor = match map.impactor {
        Some(k) => format!("impactor {}", k.code()),
        None => "all impactors".to_string(),
    };
    let title = format!(
        "Injury probability map - condition {}, {}",
        map.condition.code(),
        impactor
    );
    let subtitle = format!(
        "P(injury more severe than {}) per cell - {} - toolkit {}",
        tolerated.code(),
        map.source,
        impactrig::TOOLKIT_VERSION
    );

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.0} {height:.0}\" font-family=\"sans-serif\">"
    );
    let _ = writeln!(
        out,
        "  <defs><pattern id=\"nodata\" width=\"8\" height=\"8\" patternUnits=\"userSpaceOnUse\" \
         patternTransform=\"rotate(45)\"><rect width=\"8\" height=\"8\" fill=\"#f0f0f0\"/>\
         <line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"8\" stroke=\"#b0b0b0\" stroke-width=\"2\"/></pattern></defs>"
    );
    let _ = writeln!(out, "  <rect width=\"{width:.0}\" height=\"{height:.0}\" fill=\"#ffffff\"/>");
    let _ = writeln!(
        out,
        "  <text x=\"{LEFT}\" y=\"24\" font-size=\"16\" font-weight=\"bold\">{}</text>",
        escape(&title)
    );
    let _ = writeln!(
        out,
        "  <text x=\"{LEFT}\" y=\"44\" font-size=\"11\" fill=\"#555555\">{}</text>",
        escape(&subtitle)
    );

    for row in 0..rows {
        let y = TOP + row as f64 * CELL_H;
        let _ = writeln!(
            out,
            "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"end\">up to {} kg</text>",
            LEFT - 8.0,
            y + CELL_H / 2.0 + 4.0,
            escape(&map.mass_grid.label(row))
        );
        for col in 0..cols {
            let x = LEFT + col as f64 * CELL_W;
            let cell = map.cell(BinIndex::InRange(row), BinIndex::InRange(col));
            match cell.probabilities() {
                Some(p) => {
                    let exceed: f64 = InjuryClass::ALL
                        .iter()
                        .filter(|c| **c > tolerated)
                        .map(|c| p[*c as usize])
                        .sum();
                    let _ = writeln!(
                        out,
                        "  <rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{CELL_W}\" height=\"{CELL_H}\" \
                         fill=\"{}\" stroke=\"#ffffff\"/>",
                        fill(exceed)
                    );
                    let _ = writeln!(
                        out,
                        "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"14\" text-anchor=\"middle\" \
                         fill=\"{}\">{:.1}%</text>",
                        x + CELL_W / 2.0,
                        y + CELL_H / 2.0,
                        text_color(exceed),
                        exceed * 100.0
                    );
                    let _ = writeln!(
                        out,
                        "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"10\" text-anchor=\"middle\" \
                         fill=\"{}\">n={}</text>",
                        x + CELL_W / 2.0,
                        y + CELL_H / 2.0 + 14.0,
                        text_color(exceed),
                        cell.total()
                    );
                }
                None => {
                    let _ = writeln!(
                        out,
                        "  <rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{CELL_W}\" height=\"{CELL_H}\" \
                         fill=\"url(#nodata)\" stroke=\"#ffffff\"/>"
                    );
                    let _ = writeln!(
                        out,
                        "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\" \
                         fill=\"#777777\">no data</text>",
                        x + CELL_W / 2.0,
                        y + CELL_H / 2.0 + 4.0
                    );
                }
            }
        }
    }

    let axis_y = TOP + rows as f64 * CELL_H;
    for col in 0..cols {
        let (lo, hi) = map.velocity_bins.edges(col);
        let _ = writeln!(
            out,
            "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"middle\">({lo:.2}, {hi:.2}]</text>",
            LEFT + col as f64 * CELL_W + CELL_W / 2.0,
            axis_y + 18.0
        );
    }
    let _ = writeln!(
        out,
        "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" fill=\"#555555\" text-anchor=\"middle\">\
         measured collision velocity, m/s</text>",
        LEFT + cols as f64 * CELL_W / 2.0,
        axis_y + 38.0
    );

    // Five-step legend, hatch swatch last.
    let legend_y = 10.0;
    let mut legend_x = width - RIGHT - 6.0 * 58.0;
    for step in 0..5 {
        let p = step as f64 / 4.0;
        let _ = writeln!(
            out,
            "  <rect x=\"{legend_x:.1}\" y=\"{legend_y}\" width=\"20\" height=\"12\" fill=\"{}\" \
             stroke=\"#cccccc\"/><text x=\"{:.1}\" y=\"{:.1}\" font-size=\"9\">{:.0}%</text>",
            fill(p),
            legend_x + 24.0,
            legend_y + 10.0,
            p * 100.0
        );
        legend_x += 58.0;
    }
    let _ = writeln!(
        out,
        "  <rect x=\"{legend_x:.1}\" y=\"{legend_y}\" width=\"20\" height=\"12\" \
         fill=\"url(#nodata)\" stroke=\"#cccccc\"/><text x=\"{:.1}\" y=\"{:.1}\" font-size=\"9\">no data</text>",
        legend_x + 24.0,
        legend_y + 10.0
    );

    let _ = writeln!(out, "</svg>");
    out
}
