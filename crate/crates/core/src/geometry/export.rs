//! Plain-text exports of polygonized regions: a vertex CSV and a
//! standalone SVG sketch (100 px per rate unit).

use std::fmt::Write as _;

use super::Region2D;

/// Counter-clockwise vertex list, nine decimal places.
pub fn region_csv(region: &Region2D) -> String {
    let mut out = String::from("r1,r2\n");
    for (x, y) in &region.vertices {
        let _ = writeln!(out, "{x:.9},{y:.9}");
    }
    out
}

const PALETTE: [&str; 4] = ["#2b6cb0", "#c05621", "#2f855a", "#6b46c1"];
const SCALE: f64 = 100.0;
const MARGIN: f64 = 40.0;

/// Standalone SVG overlaying all regions on shared axes. The coordinate
/// frame puts the origin at the lower-left corner; one rate unit maps to
/// 100 pixels. Empty regions are listed in the legend but draw nothing.
pub fn regions_svg(regions: &[&Region2D]) -> String {
    let extent = regions
        .iter()
        .flat_map(|r| r.vertices.iter())
        .map(|(x, y)| x.max(*y))
        .fold(1.0_f64, f64::max);
    let side = 2.0 * MARGIN + extent * SCALE;
    let px = |x: f64| MARGIN + x * SCALE;
    let py = |y: f64| MARGIN + (extent - y) * SCALE;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{side:.0}\" height=\"{side:.0}\" \
         viewBox=\"0 0 {side:.0} {side:.0}\" font-family=\"monospace\" font-size=\"12\">"
    );
    let _ = writeln!(out, "  <rect width=\"{side:.0}\" height=\"{side:.0}\" fill=\"white\"/>");
    // Axes with unit ticks.
    let _ = writeln!(
        out,
        "  <line x1=\"{0:.1}\" y1=\"{1:.1}\" x2=\"{2:.1}\" y2=\"{1:.1}\" stroke=\"black\"/>",
        px(0.0),
        py(0.0),
        px(extent)
    );
    let _ = writeln!(
        out,
        "  <line x1=\"{0:.1}\" y1=\"{1:.1}\" x2=\"{0:.1}\" y2=\"{2:.1}\" stroke=\"black\"/>",
        px(0.0),
        py(0.0),
        py(extent)
    );
    let mut tick = 0.0;
    while tick <= extent + 1e-12 {
        let _ = writeln!(
            out,
            "  <line x1=\"{0:.1}\" y1=\"{1:.1}\" x2=\"{0:.1}\" y2=\"{2:.1}\" stroke=\"black\"/>\
             <text x=\"{0:.1}\" y=\"{3:.1}\" text-anchor=\"middle\">{tick}</text>",
            px(tick),
            py(0.0) - 4.0,
            py(0.0) + 4.0,
            py(0.0) + 18.0
        );
        let _ = writeln!(
            out,
            "  <line x1=\"{0:.1}\" y1=\"{1:.1}\" x2=\"{2:.1}\" y2=\"{1:.1}\" stroke=\"black\"/>\
             <text x=\"{3:.1}\" y=\"{1:.1}\" text-anchor=\"end\">{tick}</text>",
            px(0.0) - 4.0,
            py(tick),
            px(0.0) + 4.0,
            px(0.0) - 8.0
        );
        tick += 1.0;
    }
    let _ = writeln!(
        out,
        "  <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">R1</text>",
        px(extent),
        py(0.0) + 32.0
    );
    let _ = writeln!(out, "  <text x=\"{:.1}\" y=\"{:.1}\">R2</text>", px(0.0) + 8.0, py(extent));

    for (i, region) in regions.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if !region.vertices.is_empty() {
            let pts: Vec<String> = region
                .vertices
                .iter()
                .map(|(x, y)| format!("{:.2},{:.2}", px(*x), py(*y)))
                .collect();
            let _ = writeln!(
                out,
                "  <polygon points=\"{}\" fill=\"{color}\" fill-opacity=\"0.2\" \
                 stroke=\"{color}\" stroke-width=\"1.5\"/>",
                pts.join(" ")
            );
        }
        let suffix = if region.is_empty() { " (empty)" } else { "" };
        let _ = writeln!(
            out,
            "  <text x=\"{:.1}\" y=\"{:.1}\" fill=\"{color}\">{}{suffix}</text>",
            MARGIN,
            16.0 + 14.0 * i as f64,
            region.name
        );
    }
    out.push_str("</svg>\n");
    out
}
