//! Planar geometry primitives shared by the propagation simulator and the
//! imaging stages.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

/// A point (or free vector) in the 2-D scene plane, in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
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

    /// z-component of the cross product, useful for orientation tests.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn normalized(self) -> Point2 {
        let n = self.norm();
        if n == 0.0 {
            self
        } else {
            Point2::new(self.x / n, self.y / n)
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Angle in radians between two direction vectors, in [0, pi].
    pub fn angle_between(self, other: Point2) -> f64 {
        let denom = self.norm() * other.norm();
        if denom == 0.0 {
            return 0.0;
        }
        (self.dot(other) / denom).clamp(-1.0, 1.0).acos()
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

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// A finite line segment between two points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point2,
    pub b: Point2,
}

impl Segment {
    pub const fn new(a: Point2, b: Point2) -> Self {
        Self { a, b }
    }

    pub fn length(&self) -> f64 {
        self.a.distance(self.b)
    }

    pub fn direction(&self) -> Point2 {
        (self.b - self.a).normalized()
    }

    pub fn point_at(&self, t: f64) -> Point2 {
        self.a + (self.b - self.a) * t
    }

    /// Shortest distance from `p` to any point of the segment.
    pub fn distance_to_point(&self, p: Point2) -> f64 {
        let d = self.b - self.a;
        let len2 = d.dot(d);
        if len2 == 0.0 {
            return self.a.distance(p);
        }
        let t = ((p - self.a).dot(d) / len2).clamp(0.0, 1.0);
        self.point_at(t).distance(p)
    }

    /// Mirror `p` across the infinite line through this segment.
    pub fn mirror_point(&self, p: Point2) -> Point2 {
        let d = self.b - self.a;
        let len2 = d.dot(d);
        if len2 == 0.0 {
            return p;
        }
        let t = (p - self.a).dot(d) / len2;
        let foot = self.a + d * t;
        foot + (foot - p)
    }

    /// Intersection of segment `self` (parameter `t`) with segment `other`
    /// (parameter `u`); both parameters in [0, 1] when the segments meet.
    pub fn intersect(&self, other: &Segment) -> Option<(f64, f64)> {
        let r = self.b - self.a;
        let s = other.b - other.a;
        let denom = r.cross(s);
        if denom == 0.0 {
            return None;
        }
        let qp = other.a - self.a;
        let t = qp.cross(s) / denom;
        let u = qp.cross(r) / denom;
        if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
            Some((t, u))
        } else {
            None
        }
    }
}

/// Axis-aligned rectangle, `min` and `max` corners.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: Point2,
    pub max: Point2,
}

impl Rect {
    pub fn new(min: Point2, max: Point2) -> Self {
        Self { min, max }
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.width() > 0.0 && self.height() > 0.0)
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn segment_point_distance() {
        let s = Segment::new(Point2::new(0.0, 0.0), Point2::new(4.0, 0.0));
        assert_relative_eq!(s.distance_to_point(Point2::new(2.0, 3.0)), 3.0);
        assert_relative_eq!(s.distance_to_point(Point2::new(-3.0, 4.0)), 5.0);
        assert_relative_eq!(s.distance_to_point(Point2::new(5.0, 0.0)), 1.0);
    }

    #[test]
    fn mirror_across_horizontal_line() {
        let s = Segment::new(Point2::new(0.0, 1.0), Point2::new(5.0, 1.0));
        let m = s.mirror_point(Point2::new(2.0, 3.0));
        assert_relative_eq!(m.x, 2.0);
        assert_relative_eq!(m.y, -1.0);
    }

    #[test]
    fn segment_intersection_parameters() {
        let s1 = Segment::new(Point2::new(0.0, 0.0), Point2::new(4.0, 4.0));
        let s2 = Segment::new(Point2::new(0.0, 4.0), Point2::new(4.0, 0.0));
        let (t, u) = s1.intersect(&s2).unwrap();
        assert_relative_eq!(t, 0.5);
        assert_relative_eq!(u, 0.5);
        let s3 = Segment::new(Point2::new(10.0, 0.0), Point2::new(10.0, 1.0));
        assert!(s1.intersect(&s3).is_none());
    }

    #[test]
    fn angle_between_directions() {
        let a = Point2::new(1.0, 0.0);
        let b = Point2::new(0.0, 2.0);
        assert_relative_eq!(a.angle_between(b), std::f64::consts::FRAC_PI_2);
        assert_relative_eq!(a.angle_between(-a), std::f64::consts::PI);
    }
}
