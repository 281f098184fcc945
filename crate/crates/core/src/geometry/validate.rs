use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Containment, FaceCondition, ProfileSpec, RegionFill, Segment, Side, LENGTH_EPS};

/// A broken invariant of a profile. Validation collects all of them instead of
/// stopping at the first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Violation {
    NonPositiveConductivity { material: String, value: f64 },
    InvalidCavity { cavity: String, reason: String },
    TooFewVertices { region: String, count: usize },
    NonFiniteVertex { region: String },
    ZeroArea { region: String },
    SelfIntersecting { region: String },
    Overlap { first: String, second: String },
    Disconnected { components: usize },
    UncoveredEdge { from: [f64; 2], to: [f64; 2] },
    MultiplyCoveredEdge { from: [f64; 2], to: [f64; 2] },
    FaceOffBoundary { face: usize },
    DegenerateFace { face: usize },
    NonPositiveResistance { face: usize, value: f64 },
    NonFiniteAmbient { face: usize },
    InconsistentAmbient { side: Side },
    InvalidJunction { index: usize, reason: String },
    InvalidPanel { reason: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            NonPositiveConductivity { material, value } => {
                write!(
                    f,
                    "material `{material}` has non-positive conductivity {value}"
                )
            }
            InvalidCavity { cavity, reason } => write!(f, "cavity `{cavity}`: {reason}"),
            TooFewVertices { region, count } => {
                write!(
                    f,
                    "region `{region}` has {count} vertices (need at least 3)"
                )
            }
            NonFiniteVertex { region } => write!(f, "region `{region}` has a non-finite vertex"),
            ZeroArea { region } => write!(f, "region `{region}` has zero area"),
            SelfIntersecting { region } => write!(f, "region `{region}` is self-intersecting"),
            Overlap { first, second } => write!(f, "regions `{first}` and `{second}` overlap"),
            Disconnected { components } => {
                write!(f, "regions form {components} disconnected pieces")
            }
            UncoveredEdge { from, to } => write!(
                f,
                "exterior edge ({}, {}) -> ({}, {}) has no boundary face",
                from[0], from[1], to[0], to[1]
            ),
            MultiplyCoveredEdge { from, to } => write!(
                f,
                "exterior edge ({}, {}) -> ({}, {}) is covered by more than one boundary face",
                from[0], from[1], to[0], to[1]
            ),
            FaceOffBoundary { face } => {
                write!(
                    f,
                    "boundary face #{face} does not lie on the exterior boundary"
                )
            }
            DegenerateFace { face } => write!(f, "boundary face #{face} has zero length"),
            NonPositiveResistance { face, value } => {
                write!(
                    f,
                    "boundary face #{face} has non-positive surface resistance {value}"
                )
            }
            NonFiniteAmbient { face } => {
                write!(
                    f,
                    "boundary face #{face} has a non-finite ambient temperature"
                )
            }
            InconsistentAmbient { side } => {
                write!(f, "{side} faces declare different ambient temperatures")
            }
            InvalidJunction { index, reason } => write!(f, "junction #{index}: {reason}"),
            InvalidPanel { reason } => write!(f, "panel: {reason}"),
        }
    }
}

/// A stretch of a region edge that is not shared with any other region.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ExteriorPiece {
    pub segment: Segment,
}

/// Checks every profile invariant. An empty result means the profile is valid.
pub fn validate_profile(p: &ProfileSpec) -> Vec<Violation> {
    let mut out = Vec::new();

    for m in &p.materials {
        if !(m.conductivity > 0.0 && m.conductivity.is_finite()) {
            out.push(Violation::NonPositiveConductivity {
                material: m.name.clone(),
                value: m.conductivity,
            });
        }
    }
    for c in &p.cavities {
        if let Err(e) = c.spec.validate() {
            out.push(Violation::InvalidCavity {
                cavity: c.name.clone(),
                reason: e.to_string(),
            });
        }
    }
    if let Err(e) = p.cavity_constants.validate() {
        out.push(Violation::InvalidCavity {
            cavity: "constants".into(),
            reason: e.to_string(),
        });
    }

    let mut regions_ok = true;
    for r in &p.regions {
        let poly = &r.polygon;
        if poly.len() < 3 {
            out.push(Violation::TooFewVertices {
                region: r.name.clone(),
                count: poly.len(),
            });
            regions_ok = false;
            continue;
        }
        if !poly.vertices().iter().all(|v| v.is_finite()) {
            out.push(Violation::NonFiniteVertex {
                region: r.name.clone(),
            });
            regions_ok = false;
            continue;
        }
        if poly.area() <= LENGTH_EPS * LENGTH_EPS {
            out.push(Violation::ZeroArea {
                region: r.name.clone(),
            });
            regions_ok = false;
            continue;
        }
        if !poly.is_simple() {
            out.push(Violation::SelfIntersecting {
                region: r.name.clone(),
            });
            regions_ok = false;
        }
    }

    if regions_ok {
        check_overlaps(p, &mut out);
        check_connectivity(p, &mut out);
        check_faces(p, &mut out);
    }
    check_conditions(p, &mut out);
    check_junctions_and_panel(p, &mut out);
    out
}

fn check_overlaps(p: &ProfileSpec, out: &mut Vec<Violation>) {
    for (i, a) in p.regions.iter().enumerate() {
        for b in &p.regions[i + 1..] {
            if regions_overlap(&a.polygon, &b.polygon) {
                out.push(Violation::Overlap {
                    first: a.name.clone(),
                    second: b.name.clone(),
                });
            }
        }
    }
}

fn regions_overlap(a: &super::Polygon, b: &super::Polygon) -> bool {
    for ea in a.edges() {
        for eb in b.edges() {
            if ea.crosses_properly(&eb) {
                return true;
            }
        }
    }
    let strictly_inside = |pt, poly: &super::Polygon| poly.contains(pt) == Containment::Inside;
    if a.vertices().iter().any(|&v| strictly_inside(v, b))
        || b.vertices().iter().any(|&v| strictly_inside(v, a))
    {
        return true;
    }
    // Edge midpoints catch polygons that share vertices but not interiors' borders.
    if a.edges().any(|e| strictly_inside(e.point_at(0.5), b))
        || b.edges().any(|e| strictly_inside(e.point_at(0.5), a))
    {
        return true;
    }
    matches!(a.interior_point(), Some(q) if b.contains(q) != Containment::Outside)
        || matches!(b.interior_point(), Some(q) if a.contains(q) != Containment::Outside)
}

fn shares_edge(a: &super::Polygon, b: &super::Polygon) -> bool {
    a.edges()
        .any(|ea| b.edges().any(|eb| ea.collinear_overlap(&eb).is_some()))
}

fn check_connectivity(p: &ProfileSpec, out: &mut Vec<Violation>) {
    let n = p.regions.len();
    if n == 0 {
        out.push(Violation::Disconnected { components: 0 });
        return;
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if shares_edge(&p.regions[i].polygon, &p.regions[j].polygon) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }
    let components = (0..n).filter(|&i| find(&mut parent, i) == i).count();
    if components != 1 {
        out.push(Violation::Disconnected { components });
    }
}

/// Parts of region edges not shared with another region.
pub(crate) fn exterior_pieces(p: &ProfileSpec) -> Vec<ExteriorPiece> {
    let mut pieces = Vec::new();
    for (ri, region) in p.regions.iter().enumerate() {
        for edge in region.polygon.edges() {
            let mut shared: Vec<(f64, f64)> = p
                .regions
                .iter()
                .enumerate()
                .filter(|(oi, _)| *oi != ri)
                .flat_map(|(_, other)| {
                    other
                        .polygon
                        .edges()
                        .filter_map(|oe| edge.collinear_overlap(&oe))
                        .collect::<Vec<_>>()
                })
                .collect();
            shared.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut cursor = 0.0;
            let tol = LENGTH_EPS / edge.length();
            for (lo, hi) in shared {
                if lo > cursor + tol {
                    pieces.push(ExteriorPiece {
                        segment: Segment::new(edge.point_at(cursor), edge.point_at(lo)),
                    });
                }
                cursor = f64::max(cursor, hi);
            }
            if cursor < 1.0 - tol {
                pieces.push(ExteriorPiece {
                    segment: Segment::new(edge.point_at(cursor), edge.point_at(1.0)),
                });
            }
        }
    }
    pieces
}

fn check_faces(p: &ProfileSpec, out: &mut Vec<Violation>) {
    let pieces = exterior_pieces(p);
    let mut on_exterior = vec![0.0f64; p.boundary.len()];

    for piece in &pieces {
        let seg = piece.segment;
        let len = seg.length();
        let tol = LENGTH_EPS / len;
        let mut covering: Vec<(f64, f64)> = Vec::new();
        for (fi, face) in p.boundary.iter().enumerate() {
            if face.length() <= LENGTH_EPS {
                continue;
            }
            if let Some((lo, hi)) = seg.collinear_overlap(&face.segment) {
                on_exterior[fi] += (hi - lo) * len;
                covering.push((lo, hi));
            }
        }
        covering.sort_by(|a, b| a.0.total_cmp(&b.0));
        let coords = |t: f64| {
            let q = seg.point_at(t);
            [q.x, q.y]
        };
        let mut cursor = 0.0;
        for (lo, hi) in covering {
            if lo > cursor + tol {
                out.push(Violation::UncoveredEdge {
                    from: coords(cursor),
                    to: coords(lo),
                });
            } else if lo < cursor - tol {
                out.push(Violation::MultiplyCoveredEdge {
                    from: coords(lo),
                    to: coords(cursor.min(hi)),
                });
            }
            cursor = f64::max(cursor, hi);
        }
        if cursor < 1.0 - tol {
            out.push(Violation::UncoveredEdge {
                from: coords(cursor),
                to: coords(1.0),
            });
        }
    }

    for (fi, face) in p.boundary.iter().enumerate() {
        if face.length() <= LENGTH_EPS {
            out.push(Violation::DegenerateFace { face: fi });
        } else if on_exterior[fi] < face.length() - 2.0 * LENGTH_EPS {
            out.push(Violation::FaceOffBoundary { face: fi });
        }
    }
}

fn check_conditions(p: &ProfileSpec, out: &mut Vec<Violation>) {
    let mut ambients: [Option<f64>; 2] = [None, None];
    let mut flagged = [false, false];
    for (fi, face) in p.boundary.iter().enumerate() {
        if let FaceCondition::Convective {
            side,
            surface_resistance,
            ambient,
        } = face.condition
        {
            if !(surface_resistance > 0.0 && surface_resistance.is_finite()) {
                out.push(Violation::NonPositiveResistance {
                    face: fi,
                    value: surface_resistance,
                });
            }
            if !ambient.is_finite() {
                out.push(Violation::NonFiniteAmbient { face: fi });
                continue;
            }
            let slot = side as usize;
            match ambients[slot] {
                None => ambients[slot] = Some(ambient),
                Some(t) if t != ambient && !flagged[slot] => {
                    flagged[slot] = true;
                    out.push(Violation::InconsistentAmbient { side });
                }
                _ => {}
            }
        }
    }
}

fn check_junctions_and_panel(p: &ProfileSpec, out: &mut Vec<Violation>) {
    for (i, j) in p.junctions.iter().enumerate() {
        if !(j.depth > 0.0 && j.depth.is_finite()) {
            out.push(Violation::InvalidJunction {
                index: i,
                reason: format!("depth must be positive, got {}", j.depth),
            });
        }
        if !j.point.is_finite() {
            out.push(Violation::InvalidJunction {
                index: i,
                reason: "non-finite point".into(),
            });
        }
    }
    if let Some(panel) = p.panel {
        for (name, v) in [("U_p", panel.u_p), ("b_p", panel.b_p), ("b_f", panel.b_f)] {
            if !(v > 0.0 && v.is_finite()) {
                out.push(Violation::InvalidPanel {
                    reason: format!("{name} must be positive, got {v}"),
                });
            }
        }
    }
    for r in &p.regions {
        if let RegionFill::Cavity(c) = r.fill {
            if c >= p.cavities.len() {
                out.push(Violation::InvalidCavity {
                    cavity: r.name.clone(),
                    reason: "dangling cavity reference".into(),
                });
            }
        }
    }
}
