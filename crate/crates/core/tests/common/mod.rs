#![allow(dead_code)]

use pvg_core::discretize::{discretize, DiscretizedSubdomain, ScenePartition};
use pvg_core::document::*;
use pvg_core::geometry::Point;

pub fn pt(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

pub fn spline(points: &[(f64, f64)], closed: bool) -> CubicBSpline {
    CubicBSpline {
        control_points: points.iter().map(|&(x, y)| pt(x, y)).collect(),
        closed,
    }
}

/// Closed periodic spline through (approximately) a circle.
pub fn circle(cx: f64, cy: f64, r: f64, n: usize) -> CubicBSpline {
    let k = 3.0 / (2.0 + (2.0 * std::f64::consts::PI / n as f64).cos());
    CubicBSpline {
        control_points: (0..n)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                pt(cx + k * r * a.cos(), cy + k * r * a.sin())
            })
            .collect(),
        closed: true,
    }
}

pub fn dc(s: CubicBSpline, left: Rgb, right: Rgb) -> DiffusionCurve {
    DiffusionCurve {
        spline: s,
        left_colors: vec![ColorStop { t: 0.0, color: left }],
        right_colors: vec![ColorStop { t: 0.0, color: right }],
    }
}

pub fn pc(s: CubicBSpline, f_plus: f64) -> PoissonCurve {
    PoissonCurve {
        spline: s,
        laplacian_stops: vec![LaplacianStop { t: 0.0, f_plus: [f_plus; 3] }],
    }
}

pub fn pr(boundary: CubicBSpline, f_outer: Rgb) -> PoissonRegion {
    PoissonRegion {
        boundary,
        f_outer,
        delta_outer: [0.0; 3],
        delta_inner: [0.0; 3],
        bands: 2,
    }
}

/// The single subdomain of an empty `n × n` canvas with boundary values taken
/// from `g` at ring pixel centers and interior Laplacian `f` (grid coordinates).
pub fn square_problem(n: u32, g: impl Fn(Point) -> f64, f: f64) -> (ScenePartition, DiscretizedSubdomain) {
    let doc = PvgDocument::empty(n, n, [0.0; 3]);
    let part = discretize(&doc, n as usize, n as usize);
    let mut sub = part.subdomains[0].clone();
    for s in &mut sub.boundary_samples {
        let v = g(pt(s.pixel.0 as f64 + 0.5, s.pixel.1 as f64 + 0.5));
        s.color = [v; 3];
    }
    for i in 0..sub.f.len() {
        if sub.local[i] == pvg_core::discretize::LocalPixel::Interior {
            sub.f[i] = [f; 3];
        }
    }
    (part, sub)
}

/// A closed rectangle diffusion curve with sharp corners (tripled control points).
pub fn rect_dc(x0: f64, y0: f64, x1: f64, y1: f64, inside: Rgb, outside: Rgb) -> DiffusionCurve {
    // clockwise on screen (y down): the inside is on the visual right
    let mut pts = Vec::new();
    for c in [(x0, y0), (x1, y0), (x1, y1), (x0, y1)] {
        pts.extend([c; 3]);
    }
    dc(spline(&pts, true), outside, inside)
}
pub mod quadrature;
