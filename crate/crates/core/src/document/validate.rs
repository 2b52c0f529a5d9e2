use super::{Diagnostic, PrimitiveKind, PvgDocument};
use crate::geometry::{point_in_polygon, segment_intersection, Point};
use crate::spline::{flatten, Polyline};

/// Flattening tolerance (canvas pixels) for the DC–DC intersection test.
pub const DC_INTERSECTION_TOLERANCE: f64 = 0.25;

/// Checks the scene-level rules that parsing cannot: diffusion curves must not cross
/// each other, Poisson primitives need Dirichlet data around them, and regions must
/// keep their two bands ordered.
///
/// Intersections between any other pair of primitive kinds are allowed.
pub fn validate(doc: &PvgDocument) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let dcs: Vec<Polyline> = doc
        .diffusion_curves
        .iter()
        .map(|dc| flatten(&dc.spline, DC_INTERSECTION_TOLERANCE))
        .collect();

    for i in 0..dcs.len() {
        for j in i + 1..dcs.len() {
            if let Some(p) = crossing(&dcs[i], &dcs[j], DC_INTERSECTION_TOLERANCE) {
                out.push(Diagnostic::error(
                    "dc-intersection",
                    PrimitiveKind::DiffusionCurve,
                    i,
                    format!(
                        "diffusion curves #{i} and #{j} intersect near ({:.2}, {:.2}); their colors would compete",
                        p.x, p.y
                    ),
                ));
            }
        }
    }

    let closed: Vec<&Polyline> = dcs.iter().filter(|p| p.closed).collect();
    if !doc.canvas.border && closed.is_empty() {
        out.push(Diagnostic::error(
            "no-boundary",
            PrimitiveKind::Document,
            0,
            "scene has no closed diffusion curve and the canvas border carries no color",
        ));
    }
    let enclosed = |poly: &Polyline| -> bool {
        doc.canvas.border
            || closed
                .iter()
                .any(|dc| poly.points.iter().all(|&p| point_in_polygon(&dc.points, p)))
    };
    for (i, pc) in doc.poisson_curves.iter().enumerate() {
        if !enclosed(&flatten(&pc.spline, DC_INTERSECTION_TOLERANCE)) {
            out.push(Diagnostic::error(
                "no-boundary",
                PrimitiveKind::PoissonCurve,
                i,
                "poisson curve is not enclosed by any closed diffusion curve or a colored canvas border",
            ));
        }
    }
    for (i, pr) in doc.poisson_regions.iter().enumerate() {
        if !enclosed(&flatten(&pr.boundary, DC_INTERSECTION_TOLERANCE)) {
            out.push(Diagnostic::error(
                "no-boundary",
                PrimitiveKind::PoissonRegion,
                i,
                "poisson region is not enclosed by any closed diffusion curve or a colored canvas border",
            ));
        }
        if pr.bands != 2 {
            out.push(Diagnostic::error(
                "unsupported-bands",
                PrimitiveKind::PoissonRegion,
                i,
                format!("only two bands are supported, got {}", pr.bands),
            ));
            continue;
        }
        if pr.f_outer.iter().all(|&v| v == 0.0) {
            out.push(Diagnostic::warning(
                "pr-noop",
                PrimitiveKind::PoissonRegion,
                i,
                "outer Laplacian is zero on every channel; the region has no effect beyond its halo increments",
            ));
            continue;
        }
        let (a1, a2) = crate::discretize::band_areas(
            &pr.boundary,
            doc.canvas.width as usize,
            doc.canvas.height as usize,
        );
        if a2 == 0 {
            out.push(Diagnostic::warning(
                "pr-too-small",
                PrimitiveKind::PoissonRegion,
                i,
                "region is too small for an inner band at canvas resolution",
            ));
            continue;
        }
        let ratio = a1 as f64 / a2 as f64;
        for c in 0..3 {
            let fo = pr.f_outer[c];
            if fo == 0.0 {
                continue;
            }
            let f1 = fo + pr.delta_outer[c];
            let f2 = -ratio * fo + pr.delta_inner[c];
            if (f1 - f2) * fo.signum() <= 0.0 {
                out.push(Diagnostic::error(
                    "pr-non-monotone",
                    PrimitiveKind::PoissonRegion,
                    i,
                    format!("channel {c}: halo increments reorder the bands ({f1} vs {f2})"),
                ));
                break;
            }
        }
    }
    out
}

fn endpoints(p: &Polyline) -> Vec<Point> {
    if p.closed || p.points.is_empty() {
        Vec::new()
    } else {
        vec![p.points[0], *p.points.last().unwrap()]
    }
}

/// First crossing between two polylines that is not an endpoint touch.
fn crossing(a: &Polyline, b: &Polyline, tol: f64) -> Option<Point> {
    let ends: Vec<Point> = endpoints(a).into_iter().chain(endpoints(b)).collect();
    let bbox = |p: Point, q: Point| (p.x.min(q.x), p.y.min(q.y), p.x.max(q.x), p.y.max(q.y));
    for (p0, p1) in a.segments() {
        let ba = bbox(p0, p1);
        for (q0, q1) in b.segments() {
            let bb = bbox(q0, q1);
            if ba.2 < bb.0 || bb.2 < ba.0 || ba.3 < bb.1 || bb.3 < ba.1 {
                continue;
            }
            if let Some((t, _)) = segment_intersection(p0, p1, q0, q1) {
                let x = p0.lerp(p1, t);
                if ends.iter().all(|e| e.dist(x) > tol) {
                    return Some(x);
                }
            }
        }
    }
    None
}
