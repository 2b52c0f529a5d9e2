//! Laplacian constraints: Poisson-curve strips and banded Poisson regions.

use super::edt::{euclidean_distance_transform, Bitmap};
use super::{CurveGeometry, PixelKind, ScenePartition, RASTER_FLATTEN_TOLERANCE};
use crate::document::{CubicBSpline, PoissonRegion, PvgDocument, Rgb};
use crate::geometry::{Point, Side};
use crate::spline::{flatten, Polyline};
use std::collections::BTreeSet;

/// Outer band width as a fraction of the region's largest inner distance.
pub const BAND_FRACTION: f64 = 0.05;

/// A Poisson region split into its outer band `d1` and core `d2`. Masks are
/// stored over the box `[x0, x0 + d1.width) × [y0, y0 + d1.height)` in grid pixels.
#[derive(Clone, Debug)]
pub struct BandedRegion {
    pub x0: i64,
    pub y0: i64,
    pub d1: Bitmap,
    pub d2: Bitmap,
    /// stamped (non-curve) pixel counts per band
    pub a1: usize,
    pub a2: usize,
    pub d_max: f64,
    /// band Laplacians without halo increments
    pub f1_base: Rgb,
    pub f2_base: Rgb,
    /// band Laplacians as stamped
    pub f1: Rgb,
    pub f2: Rgb,
}

impl BandedRegion {
    pub fn in_d1(&self, x: i64, y: i64) -> bool {
        self.d1.get(x - self.x0, y - self.y0)
    }

    pub fn in_d2(&self, x: i64, y: i64) -> bool {
        self.d2.get(x - self.x0, y - self.y0)
    }

    pub fn contains(&self, x: i64, y: i64) -> bool {
        self.in_d1(x, y) || self.in_d2(x, y)
    }
}

/// Pixels `(x0 + i, y0 + j)` whose centers lie inside the closed polygon (even-odd).
fn fill_polygon(poly: &Polyline, x0: i64, y0: i64, width: usize, height: usize) -> Bitmap {
    let mut mask = Bitmap::new(width, height);
    let mut xs = Vec::new();
    for j in 0..height {
        let yc = (y0 + j as i64) as f64 + 0.5;
        xs.clear();
        for (a, b) in poly.segments() {
            if (a.y <= yc) != (b.y <= yc) {
                xs.push(a.x + (yc - a.y) / (b.y - a.y) * (b.x - a.x));
            }
        }
        xs.sort_by(f64::total_cmp);
        for pair in xs.chunks_exact(2) {
            // centers x + 0.5 in [pair[0], pair[1])
            let lo = ((pair[0] - 0.5).ceil() as i64 - x0).max(0);
            let hi = ((pair[1] - 0.5).ceil() as i64 - x0).min(width as i64);
            for i in lo..hi {
                mask.set(i as usize, j, true);
            }
        }
    }
    mask
}

struct Bands {
    x0: i64,
    y0: i64,
    d1: Bitmap,
    d2: Bitmap,
    d_max: f64,
}

fn split_bands(poly: &Polyline, clip_w: i64, clip_h: i64) -> Bands {
    let (mut lx, mut ly, mut hx, mut hy) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for p in &poly.points {
        lx = lx.min(p.x);
        ly = ly.min(p.y);
        hx = hx.max(p.x);
        hy = hy.max(p.y);
    }
    let x0 = (lx.floor() as i64 - 1).max(0);
    let y0 = (ly.floor() as i64 - 1).max(0);
    let x1 = (hx.ceil() as i64 + 1).min(clip_w);
    let y1 = (hy.ceil() as i64 + 1).min(clip_h);
    let (w, h) = ((x1 - x0).max(0) as usize, (y1 - y0).max(0) as usize);
    let mask = fill_polygon(poly, x0, y0, w, h);
    let dist = euclidean_distance_transform(&mask);
    let d_max = dist.iter().copied().fold(0.0, f64::max);
    let limit = BAND_FRACTION * d_max;
    let mut d1 = Bitmap::new(w, h);
    let mut d2 = Bitmap::new(w, h);
    for (i, (&m, &d)) in mask.bits.iter().zip(&dist).enumerate() {
        if m {
            if d <= limit {
                d1.bits[i] = true;
            } else {
                d2.bits[i] = true;
            }
        }
    }
    Bands { x0, y0, d1, d2, d_max }
}

/// Band pixel counts `(A1, A2)` of a region boundary rasterized at `width × height`
/// with the boundary given in canvas units of the same size.
pub fn band_areas(boundary: &CubicBSpline, width: usize, height: usize) -> (usize, usize) {
    let poly = flatten(boundary, RASTER_FLATTEN_TOLERANCE);
    let b = split_bands(&poly, width as i64, height as i64);
    (b.d1.count(), b.d2.count())
}

fn region_bands(part: &ScenePartition, pr: &PoissonRegion) -> BandedRegion {
    let grid_boundary = CubicBSpline {
        control_points: pr.boundary.control_points.iter().map(|&p| part.to_grid(p)).collect(),
        closed: true,
    };
    let poly = flatten(&grid_boundary, RASTER_FLATTEN_TOLERANCE);
    let b = split_bands(&poly, part.width as i64, part.height as i64);
    let free = |bm: &Bitmap| {
        let mut n = 0;
        for j in 0..bm.height {
            for i in 0..bm.width {
                if bm.bits[j * bm.width + i] && part.kind_at(b.x0 + i as i64, b.y0 + j as i64) == PixelKind::Free {
                    n += 1;
                }
            }
        }
        n
    };
    let (a1, a2) = (free(&b.d1), free(&b.d2));
    // Laplacians are per pixel², so shrink them as pixels get smaller
    let area_scale = 1.0 / (part.scale.0 * part.scale.1);
    let mut f1_base = [0.0; 3];
    let mut f2_base = [0.0; 3];
    let mut f1 = [0.0; 3];
    let mut f2 = [0.0; 3];
    for c in 0..3 {
        let outer = pr.f_outer[c] * area_scale;
        if a2 > 0 {
            f1_base[c] = outer;
            f2_base[c] = -(a1 as f64 / a2 as f64) * outer;
        }
        f1[c] = f1_base[c] + pr.delta_outer[c] * area_scale;
        f2[c] = f2_base[c] + pr.delta_inner[c] * area_scale;
    }
    BandedRegion {
        x0: b.x0,
        y0: b.y0,
        d1: b.d1,
        d2: b.d2,
        a1,
        a2,
        d_max: b.d_max,
        f1_base,
        f2_base,
        f1,
        f2,
    }
}

/// Grid pixels within one pixel of a Poisson curve with the Laplacian each receives.
pub fn poisson_curve_stamps(geom: &CurveGeometry, f_plus: impl Fn(f64) -> Rgb, width: usize, height: usize) -> Vec<(i64, i64, Rgb)> {
    let mut candidates = BTreeSet::new();
    for (a, b) in geom.line.segments() {
        let x0 = (a.x.min(b.x) - 1.5).floor() as i64;
        let x1 = (a.x.max(b.x) + 1.5).ceil() as i64;
        let y0 = (a.y.min(b.y) - 1.5).floor() as i64;
        let y1 = (a.y.max(b.y) + 1.5).ceil() as i64;
        for y in y0.max(0)..=y1.min(height as i64 - 1) {
            for x in x0.max(0)..=x1.min(width as i64 - 1) {
                candidates.insert((y, x));
            }
        }
    }
    let mut out = Vec::new();
    for (y, x) in candidates {
        let c = Point::new(x as f64 + 0.5, y as f64 + 0.5);
        let Some(pr) = geom.project(c) else { continue };
        if pr.past_end || pr.dist2 == 0.0 || pr.dist2 > 1.0 {
            continue;
        }
        let f = f_plus(pr.arc);
        let v = match pr.side {
            Side::Left => f,
            Side::Right => [-f[0], -f[1], -f[2]],
        };
        out.push((x, y, v));
    }
    out
}

/// Stamps every Poisson curve and region into the global Laplacian field and
/// refreshes the per-subdomain copies. Curve pixels never receive a Laplacian and
/// overlapping stamps add.
pub fn rasterize_constraints(part: &mut ScenePartition, doc: &PvgDocument) {
    let (w, h) = (part.width, part.height);
    let mut f = vec![[0.0f64; 3]; w * h];
    let add = |f: &mut Vec<Rgb>, kind: &[PixelKind], x: i64, y: i64, v: Rgb| {
        let i = y as usize * w + x as usize;
        if kind[i] == PixelKind::Free {
            for c in 0..3 {
                f[i][c] += v[c];
            }
        }
    };
    for (pc, geom) in doc.poisson_curves.iter().zip(&part.pc_curves) {
        for (x, y, v) in poisson_curve_stamps(geom, |t| pc.f_plus_at(t), w, h) {
            add(&mut f, &part.kind, x, y, v);
        }
    }
    let regions: Vec<BandedRegion> = doc.poisson_regions.iter().map(|pr| region_bands(part, pr)).collect();
    for r in &regions {
        for j in 0..r.d1.height {
            for i in 0..r.d1.width {
                let (x, y) = (r.x0 + i as i64, r.y0 + j as i64);
                let k = j * r.d1.width + i;
                if r.d1.bits[k] {
                    add(&mut f, &part.kind, x, y, r.f1);
                } else if r.d2.bits[k] {
                    add(&mut f, &part.kind, x, y, r.f2);
                }
            }
        }
    }
    part.f = f;
    part.regions = regions;
    for sub in &mut part.subdomains {
        for ly in 0..sub.height {
            for lx in 0..sub.width {
                let li = ly * sub.width + lx;
                sub.f[li] = if sub.local[li] == super::LocalPixel::Interior {
                    part.f[(sub.y0 as usize + ly) * w + sub.x0 as usize + lx]
                } else {
                    [0.0; 3]
                };
            }
        }
        sub.recompute_region_partition();
    }
}
