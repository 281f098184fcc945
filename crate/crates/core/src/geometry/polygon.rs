use serde::{Deserialize, Serialize};

use super::primitives::{Point2, Segment, LENGTH_EPS};

/// Where a point sits relative to a polygon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Containment {
    Inside,
    Boundary,
    Outside,
}

/// A closed polygon, stored counterclockwise when its signed area is nonzero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    vertices: Vec<Point2>,
}

impl Polygon {
    /// Builds a polygon, dropping a repeated closing vertex and normalizing to
    /// counterclockwise order. Degenerate input is kept as-is so that
    /// validation can report it.
    pub fn new(mut vertices: Vec<Point2>) -> Self {
        if vertices.len() > 1 && vertices[0].approx_eq(*vertices.last().unwrap()) {
            vertices.pop();
        }
        let mut polygon = Self { vertices };
        if polygon.signed_area() < 0.0 {
            polygon.vertices.reverse();
        }
        polygon
    }

    /// Axis-aligned rectangle spanning the two corners.
    pub fn rectangle(min: Point2, max: Point2) -> Self {
        Self::new(vec![
            min,
            Point2::new(max.x, min.y),
            max,
            Point2::new(min.x, max.y),
        ])
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| Segment::new(self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        if n < 3 {
            return 0.0;
        }
        0.5 * (0..n)
            .map(|i| self.vertices[i].cross(self.vertices[(i + 1) % n]))
            .sum::<f64>()
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|e| e.length()).sum()
    }

    /// (min, max) corners of the bounding box.
    pub fn bounds(&self) -> (Point2, Point2) {
        let mut min = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            min.x = min.x.min(v.x);
            min.y = min.y.min(v.y);
            max.x = max.x.max(v.x);
            max.y = max.y.max(v.y);
        }
        (min, max)
    }

    /// True for a 4-vertex polygon whose edges are all axis-parallel.
    pub fn is_axis_aligned_rectangle(&self) -> bool {
        self.vertices.len() == 4
            && self.edges().all(|e| {
                let d = e.direction();
                (d.x.abs() <= LENGTH_EPS) != (d.y.abs() <= LENGTH_EPS)
            })
    }

    pub fn contains(&self, p: Point2) -> Containment {
        if self.edges().any(|e| e.contains_point(p)) {
            return Containment::Boundary;
        }
        // Even-odd ray cast along +x.
        let mut inside = false;
        let n = self.vertices.len();
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if x > p.x {
                    inside = !inside;
                }
            }
        }
        if inside {
            Containment::Inside
        } else {
            Containment::Outside
        }
    }

    /// True when no two non-adjacent edges touch and no adjacent edges fold back.
    pub fn is_simple(&self) -> bool {
        let edges: Vec<Segment> = self.edges().collect();
        let n = edges.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    if edges[i].collinear_overlap(&edges[j]).is_some()
                        && edges[j].collinear_overlap(&edges[i]).is_some()
                        && edges[i].direction().dot(edges[j].direction()) < 0.0
                    {
                        return false;
                    }
                } else if edges[i].touches(&edges[j]) {
                    return false;
                }
            }
        }
        true
    }

    /// A point strictly inside the polygon, found on a horizontal scanline.
    pub fn interior_point(&self) -> Option<Point2> {
        let (min, max) = self.bounds();
        for frac in [0.5, 0.381_966, 0.618_034, 0.25, 0.75, 0.123_4, 0.876_5] {
            let y = min.y + frac * (max.y - min.y);
            let mut xs: Vec<f64> = self
                .edges()
                .filter_map(|e| {
                    let (a, b) = (e.start, e.end);
                    if (a.y > y) != (b.y > y) {
                        Some(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y))
                    } else {
                        None
                    }
                })
                .collect();
            xs.sort_by(f64::total_cmp);
            for pair in xs.chunks_exact(2) {
                let candidate = Point2::new(0.5 * (pair[0] + pair[1]), y);
                if pair[1] - pair[0] > 2.0 * LENGTH_EPS
                    && self.contains(candidate) == Containment::Inside
                {
                    return Some(candidate);
                }
            }
        }
        None
    }

    /// Smallest distance between non-adjacent edges; for triangles, the
    /// smallest altitude. A proxy for the thinnest part of the region.
    pub fn min_feature_width(&self) -> f64 {
        let edges: Vec<Segment> = self.edges().collect();
        let n = edges.len();
        if n == 3 {
            let area = self.area();
            return edges
                .iter()
                .map(|e| 2.0 * area / e.length())
                .fold(f64::INFINITY, f64::min);
        }
        let mut width = f64::INFINITY;
        for i in 0..n {
            for j in (i + 1)..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    continue;
                }
                let d = segment_distance(&edges[i], &edges[j]);
                width = width.min(d);
            }
        }
        width
    }
}

fn segment_distance(a: &Segment, b: &Segment) -> f64 {
    if a.intersection(b).is_some() {
        return 0.0;
    }
    a.distance_to(b.start)
        .min(a.distance_to(b.end))
        .min(b.distance_to(a.start))
        .min(b.distance_to(a.end))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l_shape() -> Polygon {
        Polygon::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(0.04, 0.0),
            Point2::new(0.04, 0.01),
            Point2::new(0.01, 0.01),
            Point2::new(0.01, 0.04),
            Point2::new(0.0, 0.04),
        ])
    }

    #[test]
    fn clockwise_input_is_normalized() {
        let p = Polygon::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(1.0, 1.0),
            Point2::new(1.0, 0.0),
        ]);
        assert!(p.signed_area() > 0.0);
        assert_eq!(p.area(), 1.0);
    }

    #[test]
    fn containment_classes() {
        let p = l_shape();
        assert_eq!(p.contains(Point2::new(0.005, 0.03)), Containment::Inside);
        assert_eq!(p.contains(Point2::new(0.03, 0.03)), Containment::Outside);
        assert_eq!(p.contains(Point2::new(0.02, 0.01)), Containment::Boundary);
    }

    #[test]
    fn bowtie_is_not_simple() {
        let p = Polygon::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
        ]);
        assert!(!p.is_simple());
        assert!(l_shape().is_simple());
    }

    #[test]
    fn feature_width_of_l_shape_is_arm_thickness() {
        assert!((l_shape().min_feature_width() - 0.01).abs() < 1e-12);
        let thin = Polygon::rectangle(Point2::new(0.0, 0.0), Point2::new(0.1, 0.0015));
        assert!((thin.min_feature_width() - 0.0015).abs() < 1e-12);
    }

    #[test]
    fn interior_point_lies_inside() {
        let p = l_shape();
        let q = p.interior_point().unwrap();
        assert_eq!(p.contains(q), Containment::Inside);
    }
}
