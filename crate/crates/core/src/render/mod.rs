//! Scene solve, per-pixel evaluation, anti-aliasing and zooming.

mod antialias;
mod encode;
mod zoom;

pub use antialias::{antialias, bilinear_sampler, dc_pixel_color, curve_crossings, redraw_poisson_curves, CurveCrossing};
pub use encode::{encode_png, quantize_8, quantize_16, write_png, BitDepth};
pub use zoom::{ZoomRequest, JACOBI_ITERATIONS, RELOCATION_RADIUS};

use crate::discretize::{discretize, PixelKind, ScenePartition, NO_LABEL};
use crate::document::{validate, Diagnostic, PvgDocument, Rgb};
use crate::geometry::Point;
use crate::solver::{discretize_subdomain, solve_discretized, SolveError, SubdomainModel};
use rayon::prelude::*;
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("document has {} blocking diagnostic(s): {}", .0.len(), .0.first().map(|d| d.message.as_str()).unwrap_or(""))]
    Invalid(Vec<Diagnostic>),
    #[error("bad viewport: {0}")]
    Viewport(String),
    #[error("output size must be positive")]
    EmptyImage,
}

/// Document-space rectangle shown by an image.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Viewport {
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
}

impl Viewport {
    pub fn canvas(doc: &PvgDocument) -> Self {
        Viewport {
            x: 0.0,
            y: 0.0,
            width: doc.canvas.width as f64,
            height: doc.canvas.height as f64,
        }
    }
}

/// Three planes of linear color. Values are clamped only when encoding.
#[derive(Clone, Debug, PartialEq)]
pub struct RasterImage {
    pub width: usize,
    pub height: usize,
    pub channels: [Vec<f64>; 3],
    pub viewport: Viewport,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, viewport: Viewport) -> Self {
        let n = width * height;
        RasterImage {
            width,
            height,
            channels: [vec![0.0; n], vec![0.0; n], vec![0.0; n]],
            viewport,
        }
    }

    pub fn get(&self, x: usize, y: usize) -> Rgb {
        let i = y * self.width + x;
        [self.channels[0][i], self.channels[1][i], self.channels[2][i]]
    }

    pub fn set(&mut self, x: usize, y: usize, v: Rgb) {
        let i = y * self.width + x;
        for c in 0..3 {
            self.channels[c][i] = v[c];
        }
    }

    /// Document point → continuous pixel coordinates of this image.
    pub fn to_pixel(&self, p: Point) -> Point {
        let v = &self.viewport;
        Point::new((p.x - v.x) * self.width as f64 / v.width, (p.y - v.y) * self.height as f64 / v.height)
    }

    fn from_rows(width: usize, height: usize, viewport: Viewport, rows: Vec<Vec<Rgb>>) -> Self {
        let mut img = RasterImage::new(width, height, viewport);
        for (y, row) in rows.into_iter().enumerate() {
            for (x, v) in row.into_iter().enumerate() {
                img.set(x, y, v);
            }
        }
        img
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq)]
pub struct Timings {
    /// rasterization, constraints, quad-trees and adjacency
    pub discretize: Duration,
    /// assembly, factorization and term lists
    pub solve: Duration,
    /// whole pipeline including per-pixel evaluation
    pub total: Duration,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct RenderOptions {
    /// samples per pixel side for non-curve pixels
    pub supersample: u32,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions { supersample: 1 }
    }
}

/// A document discretized and solved at one resolution. Zoom requests reuse it.
#[derive(Debug)]
pub struct SolvedScene {
    pub doc: PvgDocument,
    pub partition: ScenePartition,
    /// one entry per subdomain; `None` when it has no Dirichlet data or failed
    pub models: Vec<Option<SubdomainModel>>,
    pub failures: Vec<SolveError>,
    pub factorizations: usize,
    pub timings: Timings,
}

/// Validates, discretizes and solves every subdomain at `width × height`.
pub fn solve_scene(doc: &PvgDocument, width: usize, height: usize) -> Result<SolvedScene, RenderError> {
    if width == 0 || height == 0 {
        return Err(RenderError::EmptyImage);
    }
    let errors: Vec<Diagnostic> = validate(doc).into_iter().filter(|d| d.is_error()).collect();
    if !errors.is_empty() {
        return Err(RenderError::Invalid(errors));
    }
    let start = Instant::now();
    let partition = discretize(doc, width, height);
    let discrete: Vec<_> = partition
        .subdomains
        .par_iter()
        .map(|s| s.is_solvable().then(|| discretize_subdomain(s)))
        .collect();
    let t_d = start.elapsed();
    let t0 = Instant::now();
    let solved: Vec<Option<Result<SubdomainModel, SolveError>>> = partition
        .subdomains
        .par_iter()
        .zip(discrete)
        .map(|(s, d)| d.map(|(cells, graph)| solve_discretized(s, cells, graph)))
        .collect();
    let t_s = t0.elapsed();
    let mut models = Vec::with_capacity(solved.len());
    let mut failures = Vec::new();
    let mut factorizations = 0;
    for r in solved {
        match r {
            Some(Ok(m)) => {
                factorizations += (m.system.n_interior > 0) as usize;
                models.push(Some(m));
            }
            Some(Err(e)) => {
                log::warn!("{e}");
                failures.push(e);
                models.push(None);
            }
            None => models.push(None),
        }
    }
    Ok(SolvedScene {
        doc: doc.clone(),
        partition,
        models,
        failures,
        factorizations,
        timings: Timings {
            discretize: t_d,
            solve: t_s,
            total: start.elapsed(),
        },
    })
}

/// Validates, solves and renders in one call.
pub fn render(doc: &PvgDocument, width: usize, height: usize) -> Result<RasterImage, RenderError> {
    Ok(solve_scene(doc, width, height)?.render(RenderOptions::default()))
}

impl SolvedScene {
    pub fn image_width(&self) -> usize {
        self.partition.image_width
    }

    pub fn image_height(&self) -> usize {
        self.partition.image_height
    }

    /// Solution value at a grid point of subdomain `label`, or the background when
    /// that subdomain has no solution.
    pub fn eval_grid(&self, label: u32, p: Point) -> Rgb {
        match self.models.get(label as usize).and_then(|m| m.as_ref()) {
            Some(m) => m.solution.eval_point(p),
            None => self.partition.background,
        }
    }

    /// Value of a grid pixel before anti-aliasing: the solution at its center for
    /// free pixels (averaged over `n × n` samples), `None` on curve pixels.
    fn field_value(&self, gx: i64, gy: i64, n: u32) -> Option<Rgb> {
        let part = &self.partition;
        if part.kind_at(gx, gy) != PixelKind::Free {
            return None;
        }
        let label = part.label_at(gx, gy);
        if label == NO_LABEL {
            return None;
        }
        if n <= 1 {
            return Some(self.eval_grid(label, Point::new(gx as f64 + 0.5, gy as f64 + 0.5)));
        }
        let mut acc = [0.0; 3];
        let step = 1.0 / n as f64;
        for sy in 0..n {
            for sx in 0..n {
                let p = Point::new(gx as f64 + (sx as f64 + 0.5) * step, gy as f64 + (sy as f64 + 0.5) * step);
                let v = self.eval_grid(label, p);
                for c in 0..3 {
                    acc[c] += v[c];
                }
            }
        }
        let w = step * step;
        Some(acc.map(|a| a * w))
    }

    /// The solution at every pixel center, curve pixels left at zero.
    pub fn field_image(&self, opts: RenderOptions) -> RasterImage {
        let (w, h) = (self.image_width(), self.image_height());
        let rows: Vec<Vec<Rgb>> = (0..h)
            .into_par_iter()
            .map(|y| {
                (0..w)
                    .map(|x| self.field_value(x as i64 + 1, y as i64 + 1, opts.supersample).unwrap_or([0.0; 3]))
                    .collect()
            })
            .collect();
        RasterImage::from_rows(w, h, Viewport::canvas(&self.doc), rows)
    }

    /// Full render: field evaluation followed by the anti-aliasing pass.
    pub fn render(&self, opts: RenderOptions) -> RasterImage {
        let mut img = self.field_image(opts);
        antialias(&mut img, &self.partition, &self.doc);
        img
    }
}
