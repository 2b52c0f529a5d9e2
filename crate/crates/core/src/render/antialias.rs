//! Curve anti-aliasing: diffusion-curve pixels take the coverage-weighted side
//! colors, Poisson-curve pixels are redrawn from the field on either side.

use super::RasterImage;
use crate::discretize::{raster, CurveGeometry, PixelKind, ScenePartition, NO_LABEL};
use crate::document::{PvgDocument, Rgb};
use crate::geometry::{closest_on_segment, left_normal, pixel_left_coverage, Point, Side};
use std::collections::BTreeMap;

/// The curve segment nearest to the center of a pixel it passes through, in the
/// pixel coordinates of some target image.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct CurveCrossing {
    pub pixel: (usize, usize),
    pub curve: usize,
    pub segment: usize,
    /// parameter of the foot along the segment
    pub t: f64,
    pub foot: Point,
    /// unit normal towards the curve's left
    pub left: Point,
    /// fraction of the pixel left of the segment's line
    pub coverage: f64,
    /// the foot is an open curve's endpoint reached by clamping
    pub past_end: bool,
}

/// Pixels of a `width × height` image crossed by `curves`, where `map` takes grid
/// coordinates to the image's pixel coordinates (an axis-aligned scale and shift).
pub fn curve_crossings(curves: &[CurveGeometry], map: impl Fn(Point) -> Point, width: usize, height: usize) -> BTreeMap<(usize, usize), CurveCrossing> {
    let mut out: BTreeMap<(usize, usize), (f64, CurveCrossing)> = BTreeMap::new();
    for (ci, g) in curves.iter().enumerate() {
        let last = g.line.segment_count().saturating_sub(1);
        for (si, (a, b)) in g.line.segments().enumerate() {
            let (a, b) = (map(a), map(b));
            let d = b - a;
            raster::supercover(a, b, |x, y| {
                if x < 0 || y < 0 || x >= width as i64 || y >= height as i64 {
                    return;
                }
                let center = Point::new(x as f64 + 0.5, y as f64 + 0.5);
                let (t, dist2) = closest_on_segment(a, b, center);
                let raw = if d.norm2() > 0.0 { (center - a).dot(d) / d.norm2() } else { 0.0 };
                let past_end = !g.line.closed && ((si == 0 && raw < 0.0) || (si == last && raw > 1.0));
                let c = CurveCrossing {
                    pixel: (x as usize, y as usize),
                    curve: ci,
                    segment: si,
                    t,
                    foot: a + d * t,
                    left: left_normal(d),
                    coverage: pixel_left_coverage(x as f64, y as f64, a, d),
                    past_end,
                };
                let e = out.entry(c.pixel).or_insert((f64::INFINITY, c));
                if dist2 < e.0 {
                    *e = (dist2, c);
                }
            });
        }
    }
    out.into_iter().map(|(k, (_, c))| (k, c)).collect()
}

/// Coverage blend of a diffusion curve's two side colors at a crossing.
pub fn dc_pixel_color(doc: &PvgDocument, curves: &[CurveGeometry], c: &CurveCrossing) -> Rgb {
    let dc = &doc.diffusion_curves[c.curve];
    let arc = curves[c.curve].arc_of(c.segment, c.t);
    let l = dc.color_at(Side::Left, arc);
    let r = dc.color_at(Side::Right, arc);
    std::array::from_fn(|k| c.coverage * l[k] + (1.0 - c.coverage) * r[k])
}

/// Bilinear interpolation of pixel-center values at grid point `p`; pixels for
/// which `value` is `None` are left out and the weights renormalized.
pub fn bilinear_sampler(p: Point, value: impl Fn(i64, i64) -> Option<Rgb>) -> Option<Rgb> {
    let (fx, fy) = (p.x - 0.5, p.y - 0.5);
    let (x0, y0) = (fx.floor(), fy.floor());
    let (tx, ty) = (fx - x0, fy - y0);
    let (x0, y0) = (x0 as i64, y0 as i64);
    let mut acc = [0.0; 3];
    let mut wsum = 0.0;
    for (dx, dy, w) in [(0, 0, (1.0 - tx) * (1.0 - ty)), (1, 0, tx * (1.0 - ty)), (0, 1, (1.0 - tx) * ty), (1, 1, tx * ty)] {
        if w <= 0.0 {
            continue;
        }
        if let Some(v) = value(x0 + dx, y0 + dy) {
            for c in 0..3 {
                acc[c] += w * v[c];
            }
            wsum += w;
        }
    }
    (wsum > 1e-9).then(|| acc.map(|a| a / wsum))
}

/// Redraws the pixels a Poisson curve passes through from the field one grid
/// pixel to either side of the curve, weighted by coverage. `sample(p)` reads the
/// field at grid point `p`; `to_grid` maps image pixel coordinates to grid
/// coordinates and `unit` is one grid pixel in image pixels.
pub fn redraw_poisson_curves(
    img: &mut RasterImage,
    crossings: &BTreeMap<(usize, usize), CurveCrossing>,
    to_grid: impl Fn(Point) -> Point,
    unit: f64,
    sample: impl Fn(usize, usize, Point) -> Option<Rgb>,
) {
    let mut updates = Vec::new();
    for c in crossings.values() {
        if c.past_end {
            continue;
        }
        let (x, y) = c.pixel;
        let l = sample(x, y, to_grid(c.foot + c.left * unit));
        let r = sample(x, y, to_grid(c.foot - c.left * unit));
        if let (Some(l), Some(r)) = (l, r) {
            updates.push((x, y, std::array::from_fn(|k| c.coverage * l[k] + (1.0 - c.coverage) * r[k])));
        }
    }
    for (x, y, v) in updates {
        img.set(x, y, v);
    }
}

/// Anti-aliasing of a field image rendered at the partition's resolution.
pub fn antialias(img: &mut RasterImage, part: &ScenePartition, doc: &PvgDocument) {
    let (w, h) = (img.width, img.height);
    let to_image = |p: Point| Point::new(p.x - 1.0, p.y - 1.0);
    let to_grid = |p: Point| Point::new(p.x + 1.0, p.y + 1.0);

    let field = img.clone();
    let pcs = curve_crossings(&part.pc_curves, to_image, w, h);
    redraw_poisson_curves(img, &pcs, to_grid, 1.0, |x, y, p| {
        let label = part.label_at(x as i64 + 1, y as i64 + 1);
        if label == NO_LABEL {
            return None;
        }
        bilinear_sampler(p, |gx, gy| {
            (part.kind_at(gx, gy) == PixelKind::Free && part.label_at(gx, gy) == label).then(|| field.get((gx - 1) as usize, (gy - 1) as usize))
        })
    });

    let dcs = curve_crossings(&part.dc_curves, to_image, w, h);
    for c in dcs.values() {
        img.set(c.pixel.0, c.pixel.1, dc_pixel_color(doc, &part.dc_curves, c));
    }
    // curve pixels the crossing walk did not reach
    for y in 0..h {
        for x in 0..w {
            let (gx, gy) = (x as i64 + 1, y as i64 + 1);
            if part.kind_at(gx, gy) == PixelKind::Curve && !dcs.contains_key(&(x, y)) {
                if let Some((l, r, cov)) = part.curve_pixel_colors(doc, gx, gy) {
                    img.set(x, y, std::array::from_fn(|k| cov * l[k] + (1.0 - cov) * r[k]));
                }
            }
        }
    }
}
