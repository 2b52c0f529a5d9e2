//! Zooming into a solved scene without refactorizing: free pixels evaluate the
//! spline solution directly, pixels that fall inside a base-resolution curve
//! pixel are relocated to a nearby free pixel and then smoothed.

use super::{bilinear_sampler, curve_crossings, dc_pixel_color, redraw_poisson_curves, RasterImage, RenderError, SolvedScene, Viewport};
use crate::discretize::{PixelKind, NO_LABEL};
use crate::document::Rgb;
use crate::geometry::{side_of, Point};
use rayon::prelude::*;
use std::collections::{BTreeSet, HashMap};

/// Chebyshev search radius, in base pixels, for relocating curve pixels.
pub const RELOCATION_RADIUS: i64 = 3;
pub const JACOBI_ITERATIONS: usize = 20;

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ZoomRequest {
    pub viewport: Viewport,
    pub width: usize,
    pub height: usize,
}

#[derive(Copy, Clone, Debug)]
enum Origin {
    Direct,
    /// value copied from a base pixel; `edge` is the color across the curve
    Relocated { edge: Option<Rgb> },
    Outside,
}

#[derive(Copy, Clone, Debug)]
struct OutPixel {
    label: u32,
    origin: Origin,
    base: Option<(i64, i64)>,
}

/// Output pixel ↔ grid coordinates.
#[derive(Copy, Clone, Debug)]
struct Frame {
    g0: Point,
    s: Point,
}

impl Frame {
    fn to_grid(&self, p: Point) -> Point {
        Point::new(self.g0.x + p.x * self.s.x, self.g0.y + p.y * self.s.y)
    }

    fn to_out(&self, g: Point) -> Point {
        Point::new((g.x - self.g0.x) / self.s.x, (g.y - self.g0.y) / self.s.y)
    }
}

impl SolvedScene {
    fn check_zoom(&self, req: &ZoomRequest) -> Result<Frame, RenderError> {
        if req.width == 0 || req.height == 0 {
            return Err(RenderError::EmptyImage);
        }
        let v = req.viewport;
        let (cw, ch) = (self.doc.canvas.width as f64, self.doc.canvas.height as f64);
        let eps = 1e-9 * cw.max(ch);
        if !(v.x.is_finite() && v.y.is_finite() && v.width > 0.0 && v.height > 0.0) {
            return Err(RenderError::Viewport("viewport must have positive finite size".into()));
        }
        if v.x < -eps || v.y < -eps || v.x + v.width > cw + eps || v.y + v.height > ch + eps {
            return Err(RenderError::Viewport(format!(
                "viewport {} {} {} {} is not inside the {}×{} canvas",
                v.x, v.y, v.width, v.height, cw, ch
            )));
        }
        let (sx, sy) = self.partition.scale;
        let s = Point::new(v.width * sx / req.width as f64, v.height * sy / req.height as f64);
        if s.x > 1.0 + 1e-9 || s.y > 1.0 + 1e-9 {
            return Err(RenderError::Viewport(format!(
                "zoom factor below 1 (each output pixel covers {:.3}×{:.3} base pixels)",
                s.x, s.y
            )));
        }
        Ok(Frame {
            g0: Point::new(1.0 + v.x * sx, 1.0 + v.y * sy),
            s,
        })
    }

    /// Nearest free base pixel to `g` within the relocation radius, preferring
    /// pixels on the same side of the curve as `g`.
    fn relocate(&self, b: (i64, i64), g: Point) -> Option<((i64, i64), Option<Rgb>)> {
        let part = &self.partition;
        let hit = match part.kind_at(b.0, b.1) {
            PixelKind::Curve => part.nearest_hit(b.0, b.1, g),
            _ => None,
        };
        let edge = match part.kind_at(b.0, b.1) {
            PixelKind::Border => Some(part.background),
            PixelKind::Curve => hit.as_ref().map(|(c, pr)| self.doc.diffusion_curves[*c].color_at(pr.side, pr.arc)),
            _ => None,
        };
        let mut best_same: Option<(f64, (i64, i64))> = None;
        let mut best_any: Option<(f64, (i64, i64))> = None;
        for dy in -RELOCATION_RADIUS..=RELOCATION_RADIUS {
            for dx in -RELOCATION_RADIUS..=RELOCATION_RADIUS {
                let q = (b.0 + dx, b.1 + dy);
                if part.kind_at(q.0, q.1) != PixelKind::Free || part.label_at(q.0, q.1) == NO_LABEL {
                    continue;
                }
                let c = Point::new(q.0 as f64 + 0.5, q.1 as f64 + 0.5);
                let d = c.dist(g);
                let better = |best: &Option<(f64, (i64, i64))>| best.is_none_or(|(bd, bq)| d < bd || (d == bd && q < bq));
                if better(&best_any) {
                    best_any = Some((d, q));
                }
                let same = match &hit {
                    Some((ci, pr)) => {
                        let (a, e) = part.dc_curves[*ci].line.segment(pr.segment);
                        side_of(a, e, c) == pr.side
                    }
                    None => true,
                };
                if same && better(&best_same) {
                    best_same = Some((d, q));
                }
            }
        }
        best_same.or(best_any).map(|(_, q)| (q, edge))
    }

    /// Renders `req.viewport` at `req.width × req.height` from the existing
    /// solution. The output must not be coarser than the scene's own resolution.
    pub fn render_zoom(&self, req: &ZoomRequest) -> Result<RasterImage, RenderError> {
        let frame = self.check_zoom(req)?;
        let part = &self.partition;
        let (w, h) = (req.width, req.height);

        let pixels: Vec<(OutPixel, Option<Rgb>)> = (0..w * h)
            .into_par_iter()
            .map(|i| {
                let (x, y) = (i % w, i / w);
                let g = frame.to_grid(Point::new(x as f64 + 0.5, y as f64 + 0.5));
                let b = (g.x.floor() as i64, g.y.floor() as i64);
                if part.kind_at(b.0, b.1) == PixelKind::Free && part.label_at(b.0, b.1) != NO_LABEL {
                    let label = part.label_at(b.0, b.1);
                    let p = OutPixel { label, origin: Origin::Direct, base: Some(b) };
                    return (p, Some(self.eval_grid(label, g)));
                }
                match self.relocate(b, g) {
                    Some((q, edge)) => {
                        let p = OutPixel {
                            label: part.label_at(q.0, q.1),
                            origin: Origin::Relocated { edge },
                            base: Some(q),
                        };
                        (p, None)
                    }
                    None => (OutPixel { label: NO_LABEL, origin: Origin::Outside, base: None }, Some(part.background)),
                }
            })
            .collect();

        // base values needed by relocated pixels and the Poisson-curve redraw
        let dc = curve_crossings(&part.dc_curves, |g| frame.to_out(g), w, h);
        let pc = curve_crossings(&part.pc_curves, |g| frame.to_out(g), w, h);
        let mut needed: BTreeSet<(i64, i64)> = pixels
            .iter()
            .filter(|(p, _)| matches!(p.origin, Origin::Relocated { .. }))
            .filter_map(|(p, _)| p.base)
            .collect();
        for c in pc.values() {
            for side in [1.0, -1.0] {
                let g = frame.to_grid(c.foot + c.left * (side / frame.s.x.min(frame.s.y)));
                let (fx, fy) = ((g.x - 0.5).floor() as i64, (g.y - 0.5).floor() as i64);
                for (dx, dy) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                    needed.insert((fx + dx, fy + dy));
                }
            }
        }
        let base: HashMap<(i64, i64), Rgb> = needed
            .into_par_iter()
            .filter_map(|q| self.field_value(q.0, q.1, 1).map(|v| (q, v)))
            .collect();

        let mut img = RasterImage::new(w, h, req.viewport);
        let mut current: Vec<Rgb> = pixels
            .iter()
            .map(|(p, v)| v.unwrap_or_else(|| p.base.and_then(|q| base.get(&q).copied()).unwrap_or(part.background)))
            .collect();

        let relocated: Vec<usize> = (0..w * h).filter(|&i| matches!(pixels[i].0.origin, Origin::Relocated { .. })).collect();
        for _ in 0..JACOBI_ITERATIONS {
            if relocated.is_empty() {
                break;
            }
            let next: Vec<(usize, Rgb)> = relocated
                .par_iter()
                .map(|&i| {
                    let (x, y) = ((i % w) as i64, (i / w) as i64);
                    let me = pixels[i].0;
                    let edge = match me.origin {
                        Origin::Relocated { edge } => edge,
                        _ => None,
                    };
                    let mut acc = [0.0; 3];
                    let mut n = 0.0;
                    for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                        let (nx, ny) = (x + dx, y + dy);
                        if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                            continue;
                        }
                        let j = ny as usize * w + nx as usize;
                        let v = if pixels[j].0.label == me.label { Some(current[j]) } else { edge };
                        if let Some(v) = v {
                            for c in 0..3 {
                                acc[c] += v[c];
                            }
                            n += 1.0;
                        }
                    }
                    (i, if n > 0.0 { acc.map(|a| a / n) } else { current[i] })
                })
                .collect();
            for (i, v) in next {
                current[i] = v;
            }
        }
        for (i, v) in current.iter().enumerate() {
            img.set(i % w, i / w, *v);
        }

        let unit = 1.0 / frame.s.x.min(frame.s.y);
        redraw_poisson_curves(&mut img, &pc, |p| frame.to_grid(p), unit, |x, y, g| {
            let me = pixels[y * w + x].0;
            if me.label == NO_LABEL || dc.contains_key(&(x, y)) {
                return None;
            }
            bilinear_sampler(g, |gx, gy| {
                (part.label_at(gx, gy) == me.label).then(|| base.get(&(gx, gy)).copied()).flatten()
            })
        });
        for c in dc.values() {
            img.set(c.pixel.0, c.pixel.1, dc_pixel_color(&self.doc, &part.dc_curves, c));
        }
        Ok(img)
    }
}
