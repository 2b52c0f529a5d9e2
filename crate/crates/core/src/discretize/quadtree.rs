//! Adaptive quad-tree over one subdomain.

use super::{DiscretizedSubdomain, LocalPixel};
use crate::document::Rgb;
use crate::geometry::Point;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum CellClass {
    Interior,
    Boundary,
    Exterior,
}

/// A quad-tree leaf in grid pixel coordinates.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct QuadCell {
    pub x: i64,
    pub y: i64,
    pub size: i64,
    pub class: CellClass,
    pub f: Rgb,
}

impl QuadCell {
    pub fn center(&self) -> Point {
        let h = self.size as f64 * 0.5;
        Point::new(self.x as f64 + h, self.y as f64 + h)
    }

    pub fn area(&self) -> f64 {
        (self.size * self.size) as f64
    }

    pub fn contains(&self, x: i64, y: i64) -> bool {
        x >= self.x && y >= self.y && x < self.x + self.size && y < self.y + self.size
    }
}

/// Leaves of the quad-tree plus a pixel → leaf lookup over the subdomain box.
#[derive(Clone, Debug)]
pub struct CellComplex {
    pub cells: Vec<QuadCell>,
    pub root_size: i64,
    x0: i64,
    y0: i64,
    width: usize,
    height: usize,
    leaf: Vec<u32>,
}

impl CellComplex {
    /// Leaf containing grid pixel `(x, y)`, if the pixel is inside the subdomain box.
    pub fn leaf_at(&self, x: i64, y: i64) -> Option<usize> {
        if x < self.x0 || y < self.y0 || x >= self.x0 + self.width as i64 || y >= self.y0 + self.height as i64 {
            return None;
        }
        Some(self.leaf[(y - self.y0) as usize * self.width + (x - self.x0) as usize] as usize)
    }

    /// Wraps an explicit leaf list covering the subdomain box.
    pub fn from_cells(sub: &DiscretizedSubdomain, cells: Vec<QuadCell>, root_size: i64) -> Self {
        let (w, h) = (sub.width, sub.height);
        let mut leaf = vec![u32::MAX; w * h];
        for (id, c) in cells.iter().enumerate() {
            for y in c.y.max(sub.y0)..(c.y + c.size).min(sub.y0 + h as i64) {
                for x in c.x.max(sub.x0)..(c.x + c.size).min(sub.x0 + w as i64) {
                    leaf[(y - sub.y0) as usize * w + (x - sub.x0) as usize] = id as u32;
                }
            }
        }
        CellComplex {
            cells,
            root_size,
            x0: sub.x0,
            y0: sub.y0,
            width: w,
            height: h,
            leaf,
        }
    }

    pub fn count(&self, class: CellClass) -> usize {
        self.cells.iter().filter(|c| c.class == class).count()
    }
}

/// Subdivides the subdomain box. A cell is split when it holds or touches a
/// pixel with nonzero Laplacian, or when it holds a boundary pixel; such pixels
/// therefore end in unit leaves. Leaves without any subdomain pixel are exterior.
pub fn build_quadtree(sub: &DiscretizedSubdomain) -> CellComplex {
    let (w, h) = (sub.width, sub.height);
    let mut root = 1i64;
    while root < w.max(h) as i64 {
        root *= 2;
    }
    // summed-area tables of interior and boundary pixels
    let sat = |want: LocalPixel| {
        let mut t = vec![0u32; (w + 1) * (h + 1)];
        for y in 0..h {
            let mut row = 0u32;
            for x in 0..w {
                row += (sub.local[y * w + x] == want) as u32;
                t[(y + 1) * (w + 1) + x + 1] = t[y * (w + 1) + x + 1] + row;
            }
        }
        t
    };
    let interior = sat(LocalPixel::Interior);
    let boundary = sat(LocalPixel::Boundary);
    let mut sources = vec![0u32; (w + 1) * (h + 1)];
    for y in 0..h {
        let mut row = 0u32;
        for x in 0..w {
            row += (sub.f[y * w + x] != [0.0; 3]) as u32;
            sources[(y + 1) * (w + 1) + x + 1] = sources[y * (w + 1) + x + 1] + row;
        }
    }
    let mut complex = CellComplex {
        cells: Vec::new(),
        root_size: root,
        x0: sub.x0,
        y0: sub.y0,
        width: w,
        height: h,
        leaf: vec![u32::MAX; w * h],
    };
    if w == 0 || h == 0 || sub.interior_count == 0 {
        return complex;
    }
    let ctx = Ctx {
        sub,
        interior,
        boundary,
        sources,
    };
    split(&ctx, &mut complex, 0, 0, root);
    balance(&mut complex, sub);
    complex
}

/// Splits interior leaves until no leaf is more than twice the size of a
/// touching non-exterior leaf.
fn balance(complex: &mut CellComplex, sub: &DiscretizedSubdomain) {
    loop {
        let mut coarse = Vec::new();
        for (id, c) in complex.cells.iter().enumerate() {
            if c.class != CellClass::Interior || c.size <= 2 {
                continue;
            }
            let ring = (c.x - 1..=c.x + c.size)
                .flat_map(|x| [(x, c.y - 1), (x, c.y + c.size)])
                .chain((c.y..c.y + c.size).flat_map(|y| [(c.x - 1, y), (c.x + c.size, y)]));
            let too_fine = ring.filter_map(|(x, y)| complex.leaf_at(x, y)).any(|l| {
                let n = &complex.cells[l];
                n.class != CellClass::Exterior && 2 * n.size < c.size
            });
            if too_fine {
                coarse.push(id);
            }
        }
        if coarse.is_empty() {
            return;
        }
        for id in coarse {
            let c = complex.cells[id];
            let h = c.size / 2;
            for (k, (dx, dy)) in [(0, 0), (h, 0), (0, h), (h, h)].into_iter().enumerate() {
                let child = QuadCell {
                    x: c.x + dx,
                    y: c.y + dy,
                    size: h,
                    ..c
                };
                let slot = if k == 0 {
                    complex.cells[id] = child;
                    id
                } else {
                    complex.cells.push(child);
                    complex.cells.len() - 1
                };
                for y in child.y..child.y + h {
                    for x in child.x..child.x + h {
                        let li = (y - sub.y0) as usize * complex.width + (x - sub.x0) as usize;
                        complex.leaf[li] = slot as u32;
                    }
                }
            }
        }
    }
}

struct Ctx<'a> {
    sub: &'a DiscretizedSubdomain,
    interior: Vec<u32>,
    boundary: Vec<u32>,
    sources: Vec<u32>,
}

impl Ctx<'_> {
    /// Count over the local box `[lx, lx+s) × [ly, ly+s)` clipped to the subdomain box.
    fn count(&self, table: &[u32], lx: i64, ly: i64, s: i64) -> u32 {
        let (w, h) = (self.sub.width as i64, self.sub.height as i64);
        let (x0, y0) = (lx.clamp(0, w), ly.clamp(0, h));
        let (x1, y1) = ((lx + s).clamp(0, w), (ly + s).clamp(0, h));
        let stride = (w + 1) as usize;
        let at = |x: i64, y: i64| table[y as usize * stride + x as usize];
        at(x1, y1) + at(x0, y0) - at(x0, y1) - at(x1, y0)
    }
}

fn split(ctx: &Ctx, out: &mut CellComplex, lx: i64, ly: i64, s: i64) {
    let sub = ctx.sub;
    let n_int = ctx.count(&ctx.interior, lx, ly, s);
    let n_bnd = ctx.count(&ctx.boundary, lx, ly, s);
    let leaf = |out: &mut CellComplex, class: CellClass, f: Rgb| {
        let id = out.cells.len() as u32;
        out.cells.push(QuadCell {
            x: sub.x0 + lx,
            y: sub.y0 + ly,
            size: s,
            class,
            f,
        });
        let (w, h) = (sub.width as i64, sub.height as i64);
        for y in ly.max(0)..(ly + s).min(h) {
            for x in lx.max(0)..(lx + s).min(w) {
                out.leaf[y as usize * sub.width + x as usize] = id;
            }
        }
    };
    if n_int == 0 && n_bnd == 0 {
        leaf(out, CellClass::Exterior, [0.0; 3]);
        return;
    }
    if s == 1 {
        let li = ly as usize * sub.width + lx as usize;
        match sub.local[li] {
            LocalPixel::Interior => leaf(out, CellClass::Interior, sub.f[li]),
            _ => leaf(out, CellClass::Boundary, [0.0; 3]),
        }
        return;
    }
    // a cell with only interior pixels lies entirely inside the box; cells with
    // a source in or around them stay at pixel size
    if n_bnd == 0 && n_int as i64 == s * s && ctx.count(&ctx.sources, lx - 1, ly - 1, s + 2) == 0 {
        leaf(out, CellClass::Interior, [0.0; 3]);
        return;
    }
    let h = s / 2;
    for (dx, dy) in [(0, 0), (h, 0), (0, h), (h, h)] {
        split(ctx, out, lx + dx, ly + dy, h);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::discretize;
    use crate::document::*;

    fn leaves_tile(c: &CellComplex) {
        let covered: i64 = c.cells.iter().map(|q| q.size * q.size).sum();
        assert_eq!(covered, c.root_size * c.root_size);
    }

    #[test]
    fn empty_square_coarsens_inward() {
        let doc = PvgDocument::empty(64, 64, [0.3; 3]);
        let part = discretize(&doc, 64, 64);
        let sub = &part.subdomains[0];
        let q = build_quadtree(sub);
        leaves_tile(&q);
        for c in &q.cells {
            if c.class == CellClass::Boundary {
                assert_eq!(c.size, 1);
            }
        }
        let biggest = q.cells.iter().filter(|c| c.class == CellClass::Interior).map(|c| c.size).max().unwrap();
        assert!(biggest >= 16);
        let interior_area: f64 = q.cells.iter().filter(|c| c.class == CellClass::Interior).map(|c| c.area()).sum();
        assert_eq!(interior_area as usize, sub.interior_count);
        // every boundary pixel is in exactly one unit boundary leaf
        for (x, y) in sub.boundary_pixels() {
            let id = q.leaf_at(x, y).unwrap();
            assert_eq!(q.cells[id].class, CellClass::Boundary);
        }
    }

    #[test]
    fn strips_force_refinement() {
        let mut doc = PvgDocument::empty(64, 64, [0.3; 3]);
        doc.poisson_curves.push(PoissonCurve {
            spline: CubicBSpline {
                control_points: vec![
                    Point::new(8.0, 32.0),
                    Point::new(20.0, 32.0),
                    Point::new(44.0, 32.0),
                    Point::new(56.0, 32.0),
                ],
                closed: false,
            },
            laplacian_stops: vec![LaplacianStop { t: 0.0, f_plus: [0.1; 3] }],
        });
        let part = discretize(&doc, 64, 64);
        let sub = &part.subdomains[0];
        let q = build_quadtree(sub);
        leaves_tile(&q);
        for c in q.cells.iter().filter(|c| c.class == CellClass::Interior) {
            for y in c.y..c.y + c.size {
                for x in c.x..c.x + c.size {
                    assert_eq!(sub.f_at(x, y), c.f);
                }
            }
        }
        assert_eq!(q.cells[q.leaf_at(30, 33).unwrap()].size, 1);
    }

    #[test]
    fn leaf_count_is_small_for_empty_scene() {
        let doc = PvgDocument::empty(512, 512, [0.3; 3]);
        let part = discretize(&doc, 512, 512);
        let q = build_quadtree(&part.subdomains[0]);
        let leaves = q.cells.iter().filter(|c| c.class != CellClass::Exterior).count();
        assert!(leaves * 20 < 512 * 512, "{leaves} leaves");
    }
}
