//! Cubic B-spline evaluation and adaptive flattening.
//!
//! Open splines use a clamped (open-uniform) knot vector so the curve starts at
//! the first control point and ends at the last. Closed splines are periodic
//! uniform with no duplicated control points in storage.

use crate::document::CubicBSpline;
use crate::geometry::Point;

/// A flattened spline: vertices plus normalized arc-length parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Polyline {
    pub points: Vec<Point>,
    pub closed: bool,
}

impl Polyline {
    /// Number of segments, including the closing one for closed polylines.
    pub fn segment_count(&self) -> usize {
        match (self.points.len(), self.closed) {
            (0 | 1, _) => 0,
            (n, true) => n,
            (n, false) => n - 1,
        }
    }

    pub fn segment(&self, i: usize) -> (Point, Point) {
        let n = self.points.len();
        (self.points[i], self.points[(i + 1) % n])
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        (0..self.segment_count()).map(move |i| self.segment(i))
    }

    /// Cumulative arc length at the start of every segment, plus the total length last.
    pub fn cumulative_lengths(&self) -> Vec<f64> {
        let mut acc = Vec::with_capacity(self.segment_count() + 1);
        let mut s = 0.0;
        acc.push(0.0);
        for (a, b) in self.segments() {
            s += a.dist(b);
            acc.push(s);
        }
        acc
    }

    pub fn length(&self) -> f64 {
        *self.cumulative_lengths().last().unwrap_or(&0.0)
    }

    /// Distance from `p` to the polyline.
    pub fn distance(&self, p: Point) -> f64 {
        let mut best = f64::INFINITY;
        for (a, b) in self.segments() {
            best = best.min(crate::geometry::closest_on_segment(a, b, p).1);
        }
        if self.points.len() == 1 {
            best = (self.points[0] - p).norm2();
        }
        best.sqrt()
    }

    pub fn map(&self, f: impl Fn(Point) -> Point) -> Polyline {
        Polyline {
            points: self.points.iter().map(|&p| f(p)).collect(),
            closed: self.closed,
        }
    }
}

/// Knot vector and span layout for a spline.
struct Knots {
    knots: Vec<f64>,
    /// control point indices are taken modulo this for periodic splines
    ncp: usize,
    closed: bool,
}

impl Knots {
    fn new(spline: &CubicBSpline) -> Knots {
        let n = spline.control_points.len();
        let knots = if spline.closed {
            // periodic uniform: spans 0..n, knot i = i - 3 for the wrapped control sequence
            (0..n + 7).map(|i| i as f64 - 3.0).collect()
        } else {
            let inner = n - 3;
            let mut k = vec![0.0; 4];
            for i in 1..inner {
                k.push(i as f64);
            }
            k.extend([inner as f64; 4]);
            k
        };
        Knots {
            knots,
            ncp: n,
            closed: spline.closed,
        }
    }

    fn span_count(&self) -> usize {
        if self.closed {
            self.ncp
        } else {
            self.ncp - 3
        }
    }

    /// Blossom of span `s` (covering `[knot(s+3), knot(s+4)]`) at `args`.
    fn blossom(&self, cps: &[Point], s: usize, args: [f64; 3]) -> Point {
        let cp = |i: usize| -> Point {
            if self.closed {
                cps[i % self.ncp]
            } else {
                cps[i]
            }
        };
        let k = &self.knots;
        let mut d = [cp(s), cp(s + 1), cp(s + 2), cp(s + 3)];
        // de Boor with a different parameter per level
        for (r, &t) in args.iter().enumerate() {
            let level = r + 1;
            for j in (level..4).rev() {
                let i = s + j;
                let lo = k[i];
                let hi = k[i + 4 - level];
                let a = if hi > lo { (t - lo) / (hi - lo) } else { 0.0 };
                d[j] = d[j - 1].lerp(d[j], a);
            }
        }
        d[3]
    }

    fn span_range(&self, s: usize) -> (f64, f64) {
        (self.knots[s + 3], self.knots[s + 4])
    }
}

/// Cubic Bézier control points of every non-degenerate span, in curve order.
pub fn bezier_spans(spline: &CubicBSpline) -> Vec<[Point; 4]> {
    let k = Knots::new(spline);
    let cps = &spline.control_points;
    (0..k.span_count())
        .filter_map(|s| {
            let (a, b) = k.span_range(s);
            if b <= a {
                return None;
            }
            Some([
                k.blossom(cps, s, [a, a, a]),
                k.blossom(cps, s, [a, a, b]),
                k.blossom(cps, s, [a, b, b]),
                k.blossom(cps, s, [b, b, b]),
            ])
        })
        .collect()
}

/// Evaluates the spline at global parameter `u ∈ [0, 1]` (uniform in knot space).
pub fn evaluate(spline: &CubicBSpline, u: f64) -> Point {
    let spans = bezier_spans(spline);
    let n = spans.len();
    let x = (u.clamp(0.0, 1.0) * n as f64).min(n as f64 - 1e-15);
    let s = (x.floor() as usize).min(n - 1);
    eval_bezier(&spans[s], x - s as f64)
}

pub fn eval_bezier(b: &[Point; 4], t: f64) -> Point {
    let mt = 1.0 - t;
    b[0] * (mt * mt * mt) + b[1] * (3.0 * mt * mt * t) + b[2] * (3.0 * mt * t * t) + b[3] * (t * t * t)
}

fn split_bezier(b: &[Point; 4]) -> ([Point; 4], [Point; 4]) {
    let p01 = b[0].lerp(b[1], 0.5);
    let p12 = b[1].lerp(b[2], 0.5);
    let p23 = b[2].lerp(b[3], 0.5);
    let p012 = p01.lerp(p12, 0.5);
    let p123 = p12.lerp(p23, 0.5);
    let mid = p012.lerp(p123, 0.5);
    ([b[0], p01, p012, mid], [mid, p123, p23, b[3]])
}

/// Max distance of the inner control points from the chord segment; by the convex
/// hull property this bounds the distance from the curve to the chord.
fn flatness(b: &[Point; 4]) -> f64 {
    let d1 = crate::geometry::closest_on_segment(b[0], b[3], b[1]).1;
    let d2 = crate::geometry::closest_on_segment(b[0], b[3], b[2]).1;
    d1.max(d2).sqrt()
}

fn flatten_bezier(b: &[Point; 4], tol: f64, depth: u32, out: &mut Vec<Point>) {
    if depth >= 24 || flatness(b) <= tol {
        out.push(b[3]);
        return;
    }
    let (l, r) = split_bezier(b);
    flatten_bezier(&l, tol, depth + 1, out);
    flatten_bezier(&r, tol, depth + 1, out);
}

/// Flattens a spline to a polyline within `tol` of the exact curve.
///
/// Closed splines produce a closed polyline without a repeated final vertex.
pub fn flatten(spline: &CubicBSpline, tol: f64) -> Polyline {
    assert!(tol > 0.0, "flattening tolerance must be positive");
    let spans = bezier_spans(spline);
    let mut points = Vec::new();
    if let Some(first) = spans.first() {
        points.push(first[0]);
    }
    for b in &spans {
        flatten_bezier(b, tol, 0, &mut points);
    }
    if spline.closed && points.len() > 1 {
        let first = points[0];
        if points.last().unwrap().dist(first) < 1e-12 {
            points.pop();
        }
    }
    // merge exactly collinear consecutive runs produced by flat spans
    let points = simplify_collinear(points, spline.closed);
    Polyline {
        points,
        closed: spline.closed,
    }
}

fn simplify_collinear(points: Vec<Point>, closed: bool) -> Vec<Point> {
    if points.len() < 3 {
        return points;
    }
    let mut out: Vec<Point> = Vec::with_capacity(points.len());
    for p in points {
        if out.len() >= 2 {
            let a = out[out.len() - 2];
            let b = out[out.len() - 1];
            let ab = b - a;
            let bp = p - b;
            let scale = ab.norm() * bp.norm();
            if ab.cross(bp).abs() <= 1e-12 * scale && ab.dot(bp) > 0.0 {
                out.pop();
            }
        }
        if out.last().is_none_or(|q: &Point| q.dist(p) > 1e-12) {
            out.push(p);
        }
    }
    let _ = closed;
    out
}
