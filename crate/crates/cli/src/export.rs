//! Geometry exports: polygon CSV and single-region SVG, written atomically.
//!
//! Both formats embed the clipping radius, the gate outcomes, and the axis
//! landmark scalars, so a plot can be reproduced from the file alone.

use std::fmt::Write as _;
use std::path::Path;

use secrecy_regions::algebra::instantiate::GateCheck;
use secrecy_regions::geometry::special::{SPoint, SpecialTerms};
use secrecy_regions::geometry::Region2D;

/// Writes via a dot-prefixed temp file in the target directory plus rename,
/// so readers never observe a half-written export.
pub fn write_atomic(path: &Path, content: &str) -> std::io::Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| std::io::Error::new(std::io::ErrorKind::InvalidInput, "missing file name"))?
        .to_string_lossy()
        .into_owned();
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    std::fs::write(&tmp, content)?;
    std::fs::rename(&tmp, path)
}

pub struct RegionExport<'a> {
    pub region: &'a Region2D,
    pub gates: &'a [GateCheck],
    pub terms: &'a SpecialTerms,
    pub landmarks: &'a [SPoint],
    pub rmax: f64,
    pub dist: &'a str,
}

pub fn region_csv(e: &RegionExport<'_>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# region,{}", e.region.name);
    let _ = writeln!(out, "# dist,{}", e.dist);
    let _ = writeln!(out, "# rmax,{}", e.rmax);
    let _ = writeln!(out, "# gated_out,{}", e.region.gated_out);
    for g in e.gates {
        let _ = writeln!(out, "# gate,{},{},{}", g.label, g.value, g.holds(gate_tol()));
    }
    let t = e.terms;
    for (name, v) in [("a", t.a), ("b", t.b), ("c", t.c), ("d", t.d), ("e", t.e)] {
        let _ = writeln!(out, "# special,{name},{v}");
    }
    for p in e.landmarks {
        let _ = writeln!(out, "# landmark,{},{},{},{}", p.label, p.r1, p.r2, p.limit);
    }
    if e.region.is_empty() {
        let _ = writeln!(out, "# warning,empty region");
    }
    let _ = writeln!(out, "r1,r2");
    for (x, y) in &e.region.vertices {
        let _ = writeln!(out, "{x},{y}");
    }
    out
}

const SVG_SIZE: f64 = 560.0;
const SVG_MARGIN: f64 = 56.0;

pub fn region_svg(e: &RegionExport<'_>) -> String {
    let span = SVG_SIZE - 2.0 * SVG_MARGIN;
    let scale = span / e.rmax;
    let px = |r1: f64| SVG_MARGIN + r1 * scale;
    let py = |r2: f64| SVG_SIZE - SVG_MARGIN - r2 * scale;

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" \
         viewBox=\"0 0 {0} {0}\">",
        SVG_SIZE
    );
    let _ = writeln!(s, "  <rect width=\"{0}\" height=\"{0}\" fill=\"white\"/>", SVG_SIZE);
    let _ = writeln!(
        s,
        "  <text x=\"{}\" y=\"24\" font-family=\"monospace\" font-size=\"14\">{} (rmax={})</text>",
        SVG_MARGIN,
        e.region.name,
        e.rmax
    );

    // Axes along R1 = 0 and R2 = 0, with end labels.
    let (x0, y0) = (px(0.0), py(0.0));
    let (x1, y1) = (px(e.rmax), py(e.rmax));
    let _ = writeln!(
        s,
        "  <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        s,
        "  <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        s,
        "  <text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\">R1={}</text>",
        x1 - 40.0,
        y0 + 16.0,
        e.rmax
    );
    let _ = writeln!(
        s,
        "  <text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\">R2={}</text>",
        x0 - 40.0,
        y1 - 6.0,
        e.rmax
    );

    if e.region.is_empty() {
        let _ = writeln!(
            s,
            "  <text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"14\" \
             fill=\"firebrick\">empty region</text>",
            px(e.rmax / 4.0),
            py(e.rmax / 2.0)
        );
    } else {
        let pts: Vec<String> =
            e.region.vertices.iter().map(|(x, y)| format!("{},{}", px(*x), py(*y))).collect();
        let _ = writeln!(
            s,
            "  <polygon points=\"{}\" fill=\"steelblue\" fill-opacity=\"0.35\" \
             stroke=\"steelblue\" stroke-width=\"1.5\"/>",
            pts.join(" ")
        );
        for (x, y) in &e.region.vertices {
            let _ = writeln!(
                s,
                "  <circle cx=\"{}\" cy=\"{}\" r=\"2.5\" fill=\"steelblue\"/>",
                px(*x),
                py(*y)
            );
        }
    }

    for p in e.landmarks {
        if p.r1 <= e.rmax && p.r2 <= e.rmax && p.r1 >= 0.0 && p.r2 >= 0.0 {
            let _ = writeln!(
                s,
                "  <circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"none\" stroke=\"darkorange\"/>",
                px(p.r1),
                py(p.r2)
            );
            let _ = writeln!(
                s,
                "  <text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\" \
                 fill=\"darkorange\">{}</text>",
                px(p.r1) + 5.0,
                py(p.r2) - 4.0,
                p.label
            );
        }
    }

    let mut line = SVG_SIZE - 12.0 - 14.0 * (e.gates.len().saturating_sub(1) as f64);
    for g in e.gates {
        let _ = writeln!(
            s,
            "  <text x=\"{}\" y=\"{line}\" font-family=\"monospace\" font-size=\"11\">\
             gate {} = {} ({})</text>",
            SVG_MARGIN,
            g.label,
            g.value,
            if g.holds(gate_tol()) { "holds" } else { "fails" }
        );
        line += 14.0;
    }
    s.push_str("</svg>\n");
    s
}

fn gate_tol() -> f64 {
    secrecy_regions::algebra::instantiate::GATE_TOL
}

#[cfg(test)]
mod tests {
    use super::*;
    use secrecy_regions::algebra::instantiate::instantiate;
    use secrecy_regions::algebra::presets::preset;
    use secrecy_regions::geometry::special::{s_points, special_terms};
    use secrecy_regions::geometry::polygon;
    use secrecy_regions::prob::sample::copy_satellite_joint;

    fn sample_export() -> String {
        let j = copy_satellite_joint(0.2, 0.0, 0.0, 0.45);
        let sys = preset("region-original").unwrap();
        let inst = instantiate(&sys, &j).unwrap();
        let region = polygon(&inst);
        let terms = special_terms(&j).unwrap();
        let landmarks = s_points(&terms);
        region_csv(&RegionExport {
            region: &region,
            gates: &inst.gates,
            terms: &terms,
            landmarks: &landmarks,
            rmax: inst.rmax,
            dist: "test.json",
        })
    }

    #[test]
    fn csv_carries_header_rows_and_vertices() {
        let csv = sample_export();
        assert!(csv.contains("# region,region-original"));
        assert!(csv.contains("# rmax,"));
        assert!(csv.contains("# special,e,"));
        assert!(csv.contains("# landmark,s2,"));
        let data: Vec<&str> =
            csv.lines().skip_while(|l| l.starts_with('#')).collect();
        assert_eq!(data[0], "r1,r2");
        assert!(data.len() > 3, "polygon should have vertices: {data:?}");
    }

    #[test]
    fn atomic_write_replaces_the_target() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_atomic(&path, "first").unwrap();
        write_atomic(&path, "second").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second");
        // No temp file left behind.
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
