use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{
    BoundaryFace, FaceCondition, GeometryError, Point2, ProfileSpec, Segment, Side,
    CORNER_ZONE_MAX, LENGTH_EPS, R_SI_CORNER,
};

/// Length of the increased-resistance zone for a junction of depth `d`.
pub fn corner_zone_length(depth: f64) -> f64 {
    depth.min(CORNER_ZONE_MAX)
}

fn is_internal(face: &BoundaryFace) -> bool {
    face.side() == Some(Side::Internal)
}

/// Marks internal surfaces within arc length `min(d, 30 mm)` of each declared
/// junction as corner zones with `R = 0.20`, splitting faces at the zone ends.
/// Idempotent: every split point already exists on a second pass.
pub fn apply_corner_rule(p: &ProfileSpec) -> Result<ProfileSpec, GeometryError> {
    let mut out = p.clone();
    for junction in &p.junctions {
        out.boundary = mark_zone(
            &out.boundary,
            junction.point,
            corner_zone_length(junction.depth),
        )?;
    }
    Ok(out)
}

fn mark_zone(
    faces: &[BoundaryFace],
    at: Point2,
    zone: f64,
) -> Result<Vec<BoundaryFace>, GeometryError> {
    if !faces
        .iter()
        .any(|f| is_internal(f) && f.segment.contains_point(at))
    {
        return Err(GeometryError::JunctionOffFace { x: at.x, y: at.y });
    }

    // Make the junction a vertex of the face graph.
    let mut split: Vec<BoundaryFace> = Vec::with_capacity(faces.len() + 1);
    for f in faces {
        let seg = f.segment;
        if is_internal(f)
            && seg.contains_point(at)
            && !seg.start.approx_eq(at)
            && !seg.end.approx_eq(at)
        {
            split.push(f.with_segment(Segment::new(seg.start, at)));
            split.push(f.with_segment(Segment::new(at, seg.end)));
        } else {
            split.push(f.clone());
        }
    }

    let mut nodes: Vec<Point2> = vec![at];
    let node_of = |p: Point2, nodes: &mut Vec<Point2>| -> usize {
        match nodes.iter().position(|q| q.approx_eq(p)) {
            Some(i) => i,
            None => {
                nodes.push(p);
                nodes.len() - 1
            }
        }
    };
    let mut ends: Vec<Option<(usize, usize)>> = Vec::with_capacity(split.len());
    for f in &split {
        ends.push(is_internal(f).then(|| {
            (
                node_of(f.segment.start, &mut nodes),
                node_of(f.segment.end, &mut nodes),
            )
        }));
    }

    let dist = shortest_arc_lengths(&split, &ends, nodes.len());

    let mut out = Vec::with_capacity(split.len() + 4);
    for (f, e) in split.iter().zip(&ends) {
        let Some((a, b)) = *e else {
            out.push(f.clone());
            continue;
        };
        let len = f.length();
        let from_a = ((zone - dist[a]) / len).max(0.0);
        let from_b = ((zone - dist[b]) / len).max(0.0);
        let tol = LENGTH_EPS / len;
        if from_a + from_b >= 1.0 - tol {
            out.push(into_zone(f.clone()));
            continue;
        }
        let seg = f.segment;
        let mut cuts = vec![0.0];
        if from_a > tol {
            cuts.push(from_a);
        }
        if from_b > tol {
            cuts.push(1.0 - from_b);
        }
        cuts.push(1.0);
        for w in cuts.windows(2) {
            let piece = f.with_segment(Segment::new(seg.point_at(w[0]), seg.point_at(w[1])));
            let mid = 0.5 * (w[0] + w[1]);
            let in_zone = (from_a > tol && mid < from_a) || (from_b > tol && mid > 1.0 - from_b);
            out.push(if in_zone { into_zone(piece) } else { piece });
        }
    }
    Ok(out)
}

fn into_zone(mut f: BoundaryFace) -> BoundaryFace {
    if let FaceCondition::Convective {
        ref mut surface_resistance,
        ..
    } = f.condition
    {
        *surface_resistance = R_SI_CORNER;
    }
    f.corner_zone = true;
    f
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

/// Dijkstra from node 0 over the internal faces.
fn shortest_arc_lengths(
    faces: &[BoundaryFace],
    ends: &[Option<(usize, usize)>],
    n: usize,
) -> Vec<f64> {
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (f, e) in faces.iter().zip(ends) {
        if let Some((a, b)) = *e {
            adj[a].push((b, f.length()));
            adj[b].push((a, f.length()));
        }
    }
    let mut dist = vec![f64::INFINITY; n];
    dist[0] = 0.0;
    let mut heap = BinaryHeap::from([Entry(0.0, 0)]);
    while let Some(Entry(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, w) in &adj[u] {
            if d + w < dist[v] {
                dist[v] = d + w;
                heap.push(Entry(dist[v], v));
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::super::{load_profile, FaceKind, Junction};
    use super::*;
    use proptest::prelude::*;

    fn l_shape() -> ProfileSpec {
        load_profile(include_str!("../../fixtures/l_shape.toml")).unwrap()
    }

    fn zone_length(p: &ProfileSpec) -> f64 {
        p.boundary
            .iter()
            .filter(|f| f.corner_zone)
            .map(|f| f.length())
            .sum()
    }

    #[test]
    fn zone_length_rule() {
        assert_eq!(corner_zone_length(0.050), 0.030);
        assert_eq!(corner_zone_length(0.020), 0.020);
    }

    #[test]
    fn deep_junction_is_capped_at_30mm() {
        let mut p = l_shape();
        p.junctions[0].depth = 0.050;
        let q = apply_corner_rule(&p).unwrap();
        // 30 mm in each direction along the internal surface.
        assert!(
            (zone_length(&q) - 0.060).abs() < 1e-12,
            "{}",
            zone_length(&q)
        );
        assert!(q
            .boundary
            .iter()
            .filter(|f| f.corner_zone)
            .all(|f| f.surface_resistance() == Some(R_SI_CORNER)));
    }

    #[test]
    fn shallow_junction_uses_its_depth() {
        let mut p = l_shape();
        p.junctions[0].depth = 0.020;
        let q = apply_corner_rule(&p).unwrap();
        assert!((zone_length(&q) - 0.040).abs() < 1e-12);
    }

    #[test]
    fn no_junctions_is_identity() {
        let mut p = l_shape();
        p.junctions.clear();
        assert_eq!(apply_corner_rule(&p).unwrap(), p);
    }

    #[test]
    fn junction_off_internal_face_is_an_error() {
        let mut p = l_shape();
        p.junctions = vec![Junction {
            point: Point2::new(0.5, 0.5),
            depth: 0.01,
        }];
        assert!(matches!(
            apply_corner_rule(&p),
            Err(GeometryError::JunctionOffFace { .. })
        ));
    }

    #[test]
    fn resistances_take_table_values() {
        let q = apply_corner_rule(&l_shape()).unwrap();
        for f in &q.boundary {
            match f.kind() {
                FaceKind::InternalConvection => {
                    let r = f.surface_resistance().unwrap();
                    assert!(r == 0.13 || r == 0.20);
                }
                FaceKind::ExternalConvection => assert_eq!(f.surface_resistance(), Some(0.04)),
                FaceKind::Adiabatic => assert_eq!(f.surface_resistance(), None),
            }
        }
        assert!(crate::geometry::validate_profile(&q).is_empty());
    }

    proptest! {
        #[test]
        fn idempotent_and_length_preserving(depth in 0.001f64..0.06, t in 0.05f64..0.95) {
            let mut p = l_shape();
            // Slide the junction along the inner corner's horizontal leg.
            p.junctions[0].point = Point2::new(0.01 + t * 0.03, 0.01);
            p.junctions[0].depth = depth;
            let once = apply_corner_rule(&p).unwrap();
            let twice = apply_corner_rule(&once).unwrap();
            prop_assert_eq!(&once.boundary, &twice.boundary);
            prop_assert!((once.total_boundary_length() - p.total_boundary_length()).abs() < 1e-12);
        }
    }
}
