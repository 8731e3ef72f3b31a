//! Planar geometry for instantiated rate regions: polygonization of
//! halfplane intersections, convex hulls, membership, and comparisons.
//!
//! Regions are convex subsets of the nonnegative quadrant; polygonization
//! intersects with the `[0, rmax]^2` box so every region is a bounded
//! convex polygon (possibly empty or degenerate).

pub mod export;
pub mod recover;
pub mod special;

use crate::algebra::instantiate::{Halfplane, Instantiated, GATE_TOL};

/// Coordinate tolerance for vertex dedup, membership, and equality.
pub const GEOM_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct Region2D {
    pub name: String,
    /// Defining halfplanes including the bounding box sides.
    pub halfplanes: Vec<Halfplane>,
    /// Counter-clockwise vertices of the closed polygon; empty when the
    /// region is empty (or a gate failed).
    pub vertices: Vec<(f64, f64)>,
    /// True when a gate failed and the region is empty by fiat.
    pub gated_out: bool,
}

impl Region2D {
    pub fn area(&self) -> f64 {
        shoelace(&self.vertices)
    }

    pub fn is_empty(&self) -> bool {
        self.gated_out || self.vertices.is_empty()
    }

    /// Closed-region membership with `tol` slack on each halfplane.
    pub fn contains(&self, r1: f64, r2: f64, tol: f64) -> bool {
        !self.gated_out && self.halfplanes.iter().all(|h| h.residual(r1, r2) <= tol)
    }

    /// Strict membership: strict rows must have negative residual, closed
    /// rows get `tol` slack.
    pub fn contains_strict(&self, r1: f64, r2: f64, tol: f64) -> bool {
        !self.gated_out
            && self.halfplanes.iter().all(|h| {
                let r = h.residual(r1, r2);
                if h.strict {
                    r < 0.0
                } else {
                    r <= tol
                }
            })
    }

    /// Symmetric vertex Hausdorff distance; for convex polygons this
    /// bounds the true set distance.
    pub fn hausdorff(&self, other: &Region2D) -> f64 {
        match (self.vertices.is_empty(), other.vertices.is_empty()) {
            (true, true) => 0.0,
            (true, false) | (false, true) => f64::INFINITY,
            _ => one_sided(&self.vertices, &other.vertices)
                .max(one_sided(&other.vertices, &self.vertices)),
        }
    }

    pub fn equals(&self, other: &Region2D, tol: f64) -> bool {
        self.hausdorff(other) <= tol
    }
}

fn one_sided(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    a.iter()
        .map(|p| {
            b.iter()
                .map(|q| ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

fn shoelace(v: &[(f64, f64)]) -> f64 {
    if v.len() < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..v.len() {
        let (x1, y1) = v[i];
        let (x2, y2) = v[(i + 1) % v.len()];
        acc += x1 * y2 - x2 * y1;
    }
    acc.abs() / 2.0
}

/// Builds the polygon of an instantiated system intersected with
/// `[0, rmax]^2`. A failed gate yields the empty region.
pub fn polygon(inst: &Instantiated) -> Region2D {
    let mut halfplanes = inst.halfplanes.clone();
    let r = inst.rmax;
    halfplanes.push(Halfplane { label: "box-r1".into(), a: 1.0, b: 0.0, c: r, strict: false });
    halfplanes.push(Halfplane { label: "box-r2".into(), a: 0.0, b: 1.0, c: r, strict: false });
    halfplanes.push(Halfplane { label: "box-nn1".into(), a: -1.0, b: 0.0, c: 0.0, strict: false });
    halfplanes.push(Halfplane { label: "box-nn2".into(), a: 0.0, b: -1.0, c: 0.0, strict: false });

    if !inst.gates_hold(GATE_TOL) {
        return Region2D {
            name: inst.name.clone(),
            halfplanes,
            vertices: Vec::new(),
            gated_out: true,
        };
    }

    // Candidate vertices: pairwise boundary intersections that satisfy
    // every halfplane up to tolerance.
    let mut cands: Vec<(f64, f64)> = Vec::new();
    for i in 0..halfplanes.len() {
        for j in i + 1..halfplanes.len() {
            let (h1, h2) = (&halfplanes[i], &halfplanes[j]);
            let det = h1.a * h2.b - h2.a * h1.b;
            let scale = (h1.a.hypot(h1.b)) * (h2.a.hypot(h2.b));
            if det.abs() <= 1e-12 * scale.max(1.0) {
                continue;
            }
            let x = (h1.c * h2.b - h2.c * h1.b) / det;
            let y = (h1.a * h2.c - h2.a * h1.c) / det;
            if halfplanes.iter().all(|h| h.residual(x, y) <= GEOM_TOL) {
                cands.push((x, y));
            }
        }
    }
    // Dedup within tolerance.
    let mut vertices: Vec<(f64, f64)> = Vec::new();
    for c in cands {
        if !vertices
            .iter()
            .any(|v| (v.0 - c.0).abs() <= GEOM_TOL && (v.1 - c.1).abs() <= GEOM_TOL)
        {
            vertices.push(c);
        }
    }
    sort_ccw(&mut vertices);
    Region2D { name: inst.name.clone(), halfplanes, vertices, gated_out: false }
}

fn sort_ccw(v: &mut [(f64, f64)]) {
    if v.len() < 3 {
        v.sort_by(|a, b| (a.0, a.1).partial_cmp(&(b.0, b.1)).unwrap());
        return;
    }
    let cx = v.iter().map(|p| p.0).sum::<f64>() / v.len() as f64;
    let cy = v.iter().map(|p| p.1).sum::<f64>() / v.len() as f64;
    v.sort_by(|a, b| {
        let ta = (a.1 - cy).atan2(a.0 - cx);
        let tb = (b.1 - cy).atan2(b.0 - cx);
        ta.partial_cmp(&tb).unwrap()
    });
}

/// Monotone-chain convex hull; returns counter-clockwise vertices.
pub fn hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = points.to_vec();
    pts.sort_by(|a, b| (a.0, a.1).partial_cmp(&(b.0, b.1)).unwrap());
    pts.dedup_by(|a, b| (a.0 - b.0).abs() <= GEOM_TOL && (a.1 - b.1).abs() <= GEOM_TOL);
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Convex hull of several regions' vertices, as a vertex-only region.
pub fn hull_union(regions: &[&Region2D]) -> Region2D {
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for r in regions {
        pts.extend_from_slice(&r.vertices);
    }
    Region2D {
        name: "hull".into(),
        halfplanes: Vec::new(),
        vertices: hull(&pts),
        gated_out: false,
    }
}

/// Point-in-convex-polygon for counter-clockwise vertices, with absolute
/// tolerance on the cross products (scaled by edge length).
pub fn convex_contains(vertices: &[(f64, f64)], p: (f64, f64), tol: f64) -> bool {
    let n = vertices.len();
    if n == 0 {
        return false;
    }
    if n == 1 {
        let v = vertices[0];
        return (v.0 - p.0).hypot(v.1 - p.1) <= tol;
    }
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        let len = (b.0 - a.0).hypot(b.1 - a.1);
        if len <= GEOM_TOL {
            continue;
        }
        let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
        if cross < -tol * len {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::instantiate::instantiate;
    use crate::algebra::{parse_constraint, ConstraintSystem, RateVar, SampleFamily};
    use crate::prob::sample::{random_gated_joint, seeded, SampleOpts};

    fn inst_of(rows: &[(&str, &str)]) -> Instantiated {
        let sys = ConstraintSystem {
            name: "t".into(),
            provenance: "unit test".into(),
            free: vec![RateVar::new("R1"), RateVar::new("R2")],
            bound: vec![],
            constraints: rows.iter().map(|(l, t)| parse_constraint(l, t).unwrap()).collect(),
            family: SampleFamily::Gated,
        };
        let j = random_gated_joint(&mut seeded(11), &SampleOpts::base(2)).unwrap();
        instantiate(&sys, &j).unwrap()
    }

    #[test]
    fn pentagon_vertices_exact() {
        let region = polygon(&inst_of(&[
            ("c1", "R1 <= 3"),
            ("c2", "R2 <= 2"),
            ("c3", "R1 + R2 <= 4"),
            ("nn1", "R1 >= 0"),
            ("nn2", "R2 >= 0"),
        ]));
        let want = [(0.0, 0.0), (3.0, 0.0), (3.0, 1.0), (2.0, 2.0), (0.0, 2.0)];
        assert_eq!(region.vertices.len(), want.len(), "{:?}", region.vertices);
        for w in want {
            assert!(
                region
                    .vertices
                    .iter()
                    .any(|v| (v.0 - w.0).abs() <= 1e-9 && (v.1 - w.1).abs() <= 1e-9),
                "missing vertex {w:?} in {:?}",
                region.vertices
            );
        }
        // 3x2 box minus the corner triangle between (3,1) and (2,2).
        assert!((region.area() - 5.5).abs() <= 1e-9);
        assert!(region.contains(0.5, 0.5, GEOM_TOL));
        assert!(!region.contains(3.5, 0.5, GEOM_TOL));
    }

    #[test]
    fn failed_gate_empties_region() {
        // A gate that can't hold: I(U;Y1) > 2 (entropy of a binary output
        // cannot exceed one bit).
        let region = polygon(&inst_of(&[("g", "I(U;Y1) > 2"), ("nn1", "R1 >= 0")]));
        assert!(region.gated_out);
        assert!(region.is_empty());
        assert!(!region.contains(0.0, 0.0, GEOM_TOL));
    }

    #[test]
    fn hull_union_covers_both_inputs() {
        let a = polygon(&inst_of(&[
            ("c1", "R1 <= 1"),
            ("c2", "R2 <= 2"),
            ("nn1", "R1 >= 0"),
            ("nn2", "R2 >= 0"),
        ]));
        let b = polygon(&inst_of(&[
            ("c1", "R1 <= 2"),
            ("c2", "R2 <= 1"),
            ("nn1", "R1 >= 0"),
            ("nn2", "R2 >= 0"),
        ]));
        let h = hull_union(&[&a, &b]);
        for r in [&a, &b] {
            for v in &r.vertices {
                assert!(convex_contains(&h.vertices, *v, 1e-9), "{v:?} outside hull");
            }
        }
        // The hull gains the diagonal edge between (1,2) and (2,1).
        assert!(convex_contains(&h.vertices, (1.4, 1.4), 1e-9));
        assert!(!convex_contains(&h.vertices, (1.8, 1.8), 1e-9));
    }

    #[test]
    fn equality_by_hausdorff() {
        let a = polygon(&inst_of(&[
            ("c", "R1 + R2 <= 2"),
            ("nn1", "R1 >= 0"),
            ("nn2", "R2 >= 0"),
        ]));
        let mut b = a.clone();
        assert!(a.equals(&b, 1e-12));
        b.vertices[0].0 += 1e-6;
        assert!(!a.equals(&b, 1e-9));
        assert!(a.equals(&b, 1e-5));
    }
}
