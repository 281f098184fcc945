use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

/// Absolute length tolerance (m) used for incidence and collinearity tests.
pub const LENGTH_EPS: f64 = 1e-9;

/// A point (or vector) in the cross-section plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn approx_eq(self, other: Point2) -> bool {
        self.distance(other) <= LENGTH_EPS
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

impl From<[f64; 2]> for Point2 {
    fn from(v: [f64; 2]) -> Self {
        Point2::new(v[0], v[1])
    }
}

/// A closed line segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: Point2,
    pub end: Point2,
}

impl Segment {
    pub fn new(start: Point2, end: Point2) -> Self {
        Self { start, end }
    }

    pub fn length(&self) -> f64 {
        self.start.distance(self.end)
    }

    pub fn direction(&self) -> Point2 {
        self.end - self.start
    }

    pub fn point_at(&self, t: f64) -> Point2 {
        self.start + self.direction() * t
    }

    /// Parameter of the orthogonal projection of `p` onto the supporting line.
    pub fn project(&self, p: Point2) -> f64 {
        let d = self.direction();
        let len2 = d.dot(d);
        if len2 == 0.0 {
            return 0.0;
        }
        (p - self.start).dot(d) / len2
    }

    pub fn distance_to(&self, p: Point2) -> f64 {
        let t = self.project(p).clamp(0.0, 1.0);
        self.point_at(t).distance(p)
    }

    /// Distance from `p` to the infinite supporting line.
    pub fn line_distance(&self, p: Point2) -> f64 {
        let d = self.direction();
        let len = d.norm();
        if len == 0.0 {
            return p.distance(self.start);
        }
        (p - self.start).cross(d).abs() / len
    }

    pub fn contains_point(&self, p: Point2) -> bool {
        self.distance_to(p) <= LENGTH_EPS
    }

    /// Whether `other` lies on the supporting line of `self`.
    pub fn is_collinear_with(&self, other: &Segment) -> bool {
        self.line_distance(other.start) <= LENGTH_EPS && self.line_distance(other.end) <= LENGTH_EPS
    }

    /// Parameter interval (on `self`) covered by a collinear `other`, clipped to [0, 1].
    /// `None` when the segments are not collinear or share less than `LENGTH_EPS` of length.
    pub fn collinear_overlap(&self, other: &Segment) -> Option<(f64, f64)> {
        if !self.is_collinear_with(other) {
            return None;
        }
        let (a, b) = {
            let ta = self.project(other.start);
            let tb = self.project(other.end);
            (ta.min(tb), ta.max(tb))
        };
        let lo = a.max(0.0);
        let hi = b.min(1.0);
        if (hi - lo) * self.length() > LENGTH_EPS {
            Some((lo, hi))
        } else {
            None
        }
    }

    /// Intersection of `self` with `other`, as parameters `(s, u)` on `self` and `other`.
    /// Parallel segments return `None`. Endpoint touches are included (with `LENGTH_EPS` slack).
    pub fn intersection(&self, other: &Segment) -> Option<(f64, f64)> {
        let r = self.direction();
        let q = other.direction();
        let denom = r.cross(q);
        if denom.abs() <= f64::EPSILON * r.norm() * q.norm() {
            return None;
        }
        let w = other.start - self.start;
        let s = w.cross(q) / denom;
        let u = w.cross(r) / denom;
        let s_eps = LENGTH_EPS / r.norm();
        let u_eps = LENGTH_EPS / q.norm();
        if s >= -s_eps && s <= 1.0 + s_eps && u >= -u_eps && u <= 1.0 + u_eps {
            Some((s, u))
        } else {
            None
        }
    }

    /// True when the two segments cross at a point interior to both.
    pub fn crosses_properly(&self, other: &Segment) -> bool {
        match self.intersection(other) {
            Some((s, u)) => {
                let s_eps = LENGTH_EPS / self.length();
                let u_eps = LENGTH_EPS / other.length();
                s > s_eps && s < 1.0 - s_eps && u > u_eps && u < 1.0 - u_eps
            }
            None => false,
        }
    }

    /// Inclusive intersection test, collinear overlap included.
    pub fn touches(&self, other: &Segment) -> bool {
        if self.intersection(other).is_some() {
            return true;
        }
        self.contains_point(other.start)
            || self.contains_point(other.end)
            || other.contains_point(self.start)
            || other.contains_point(self.end)
    }
}
