//! Small planar geometry toolkit shared by the discretizer, the solver and the renderer.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

/// A point or vector in the plane. Serialized as a two-element array `[x, y]`.
#[derive(Copy, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 2]> for Point {
    fn from(v: [f64; 2]) -> Self {
        Point { x: v[0], y: v[1] }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm2().sqrt()
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    pub fn lerp(self, o: Point, t: f64) -> Point {
        self + (o - self) * t
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Which side of an oriented curve a point lies on, as seen in the rendered
/// image (y axis pointing down).
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Side of `p` relative to the directed segment `a → b`. Points on the line count as left.
pub fn side_of(a: Point, b: Point, p: Point) -> Side {
    // With y pointing down, visual left of the direction d is where d × v < 0.
    if (b - a).cross(p - a) > 0.0 {
        Side::Right
    } else {
        Side::Left
    }
}

/// Unit normal pointing to the visual left of `d` (y axis down).
pub fn left_normal(d: Point) -> Point {
    let n = Point::new(d.y, -d.x);
    let len = n.norm();
    if len > 0.0 {
        n * (1.0 / len)
    } else {
        n
    }
}

/// Closest point on segment `a b` to `p`; returns the clamped parameter in `[0, 1]`
/// and the squared distance.
pub fn closest_on_segment(a: Point, b: Point, p: Point) -> (f64, f64) {
    let d = b - a;
    let len2 = d.norm2();
    let t = if len2 > 0.0 {
        ((p - a).dot(d) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let q = a + d * t;
    (t, (p - q).norm2())
}

/// A closed convex polygon whose edges carry a caller-defined tag. Edge `i` runs
/// from `verts[i]` to `verts[i + 1]` and carries `tags[i]`.
#[derive(Clone, Debug)]
pub struct TaggedPolygon<T: Copy> {
    pub verts: Vec<Point>,
    pub tags: Vec<T>,
}

impl<T: Copy> TaggedPolygon<T> {
    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64, tags: [T; 4]) -> Self {
        TaggedPolygon {
            verts: vec![
                Point::new(x0, y0),
                Point::new(x1, y0),
                Point::new(x1, y1),
                Point::new(x0, y1),
            ],
            tags: tags.to_vec(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.verts.len() < 3
    }

    pub fn area(&self) -> f64 {
        polygon_area(&self.verts)
    }

    /// Clips to `{p : n·p <= c}`; new edges created by the cut carry `tag`.
    pub fn clip(&self, n: Point, c: f64, tag: T) -> Self {
        let len = self.verts.len();
        let scale = n.norm().max(1e-300);
        let eps = 1e-12 * scale * (1.0 + c.abs() / scale);
        let mut verts = Vec::with_capacity(len + 2);
        let mut tags = Vec::with_capacity(len + 2);
        if len == 0 {
            return TaggedPolygon { verts, tags };
        }
        let val: Vec<f64> = self.verts.iter().map(|v| n.dot(*v) - c).collect();
        if val.iter().all(|&v| v <= eps) {
            return self.clone();
        }
        for i in 0..len {
            let j = (i + 1) % len;
            let (a, b) = (self.verts[i], self.verts[j]);
            let (va, vb) = (val[i], val[j]);
            let a_in = va <= eps;
            let b_in = vb <= eps;
            if a_in {
                verts.push(a);
                if b_in {
                    tags.push(self.tags[i]);
                } else {
                    // leaving: partial original edge, then the cut edge
                    tags.push(self.tags[i]);
                    let t = va / (va - vb);
                    verts.push(a.lerp(b, t));
                    tags.push(tag);
                }
            } else if b_in {
                let t = va / (va - vb);
                verts.push(a.lerp(b, t));
                tags.push(self.tags[i]);
            }
        }
        let mut out = TaggedPolygon { verts, tags };
        out.dedup();
        out
    }

    fn dedup(&mut self) {
        let n = self.verts.len();
        let keep: Vec<usize> = (0..n)
            .filter(|&i| self.verts[i].dist(self.verts[(i + 1) % n]) >= 1e-12)
            .collect();
        if keep.len() < 3 {
            self.verts.clear();
            self.tags.clear();
            return;
        }
        if keep.len() != n {
            self.verts = keep.iter().map(|&i| self.verts[i]).collect();
            self.tags = keep.iter().map(|&i| self.tags[i]).collect();
        }
    }

    /// Iterates edges as `(start, end, tag)`.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point, T)> + '_ {
        let n = self.verts.len();
        (0..n).map(move |i| (self.verts[i], self.verts[(i + 1) % n], self.tags[i]))
    }
}

/// Signed area (positive for counter-clockwise in y-up coordinates).
pub fn polygon_area(verts: &[Point]) -> f64 {
    let n = verts.len();
    if n < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..n {
        s += verts[i].cross(verts[(i + 1) % n]);
    }
    0.5 * s
}

/// Even-odd point-in-polygon test on a closed polyline.
pub fn point_in_polygon(poly: &[Point], p: Point) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n.wrapping_sub(1);
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Fraction of the unit pixel `[px, px+1] × [py, py+1]` lying on the left of the
/// infinite line through `a` along `d`.
pub fn pixel_left_coverage(px: f64, py: f64, a: Point, d: Point) -> f64 {
    // left region: d × (p − a) <= 0  ⇔  n·p <= n·a with n = (−d.y, d.x)
    let n = Point::new(-d.y, d.x);
    let sq = TaggedPolygon::rect(px, py, px + 1.0, py + 1.0, [(); 4]);
    let clipped = sq.clip(n, n.dot(a), ());
    clipped.area().abs().clamp(0.0, 1.0)
}

/// Intersection parameters of segment `a b` with another segment `c d`, if the two
/// properly intersect or touch. Returns `(t, u)` along each.
pub fn segment_intersection(a: Point, b: Point, c: Point, d: Point) -> Option<(f64, f64)> {
    let r = b - a;
    let s = d - c;
    let denom = r.cross(s);
    let qp = c - a;
    if denom.abs() < 1e-14 * (r.norm() * s.norm()).max(1e-300) {
        // parallel; report collinear overlap as an intersection at the overlap start
        if qp.cross(r).abs() > 1e-12 * r.norm().max(1.0) {
            return None;
        }
        let rr = r.norm2();
        if rr == 0.0 {
            return None;
        }
        let t0 = qp.dot(r) / rr;
        let t1 = t0 + s.dot(r) / rr;
        let (lo, hi) = if t0 < t1 { (t0, t1) } else { (t1, t0) };
        if hi < 0.0 || lo > 1.0 {
            return None;
        }
        let t = lo.max(0.0);
        return Some((t, if t1 != t0 { (t - t0) / (t1 - t0) } else { 0.0 }));
    }
    let t = qp.cross(s) / denom;
    let u = qp.cross(r) / denom;
    if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
        Some((t, u))
    } else {
        None
    }
}
