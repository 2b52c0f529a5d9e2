//! Reference finite-difference solver on the full pixel grid and the image
//! error metric used to check the spline solver against it.

use crate::discretize::{discretize, DiscretizedSubdomain, PixelKind, DIRS};
use crate::document::{validate, Diagnostic, PvgDocument};
use crate::render::{antialias, RasterImage, Viewport};
use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};
use rayon::prelude::*;
use std::collections::HashMap;
use thiserror::Error;

/// Largest subdomain the oracle factorizes directly.
pub const MAX_PIXELS: usize = 512 * 512;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("subdomain {subdomain}: {count} interior pixel(s) have no path to a boundary pixel")]
    Singular { subdomain: usize, count: usize },
    #[error("subdomain {subdomain}: factorization failed: {reason}")]
    Factorization { subdomain: usize, reason: String },
    #[error("subdomain {subdomain} has {pixels} pixels; the oracle stops at {MAX_PIXELS}")]
    TooLarge { subdomain: usize, pixels: usize },
    #[error("image sizes differ: {0}×{1} vs {2}×{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("document has blocking diagnostics: {}", .0.first().map(|d| d.message.as_str()).unwrap_or(""))]
    Invalid(Vec<Diagnostic>),
}

/// Per-pixel solution of one subdomain over its bounding box; pixels outside
/// the interior are zero.
#[derive(Clone, Debug)]
pub struct FdSolution {
    pub subdomain: usize,
    pub x0: i64,
    pub y0: i64,
    pub width: usize,
    pub height: usize,
    pub u: [Vec<f64>; 3],
    /// max over channels and interior pixels of |Σ_nbr u − 4u − f|
    pub residual: f64,
}

impl FdSolution {
    pub fn get(&self, x: i64, y: i64) -> Option<[f64; 3]> {
        let (lx, ly) = (x - self.x0, y - self.y0);
        if lx < 0 || ly < 0 || lx >= self.width as i64 || ly >= self.height as i64 {
            return None;
        }
        let i = ly as usize * self.width + lx as usize;
        Some([self.u[0][i], self.u[1][i], self.u[2][i]])
    }
}

/// Solves the 5-point discrete Poisson equation `Σ_nbr u − 4u = f` on the
/// interior pixels, with each boundary neighbour contributing its Dirichlet sample.
pub fn fd_solve(sub: &DiscretizedSubdomain) -> Result<FdSolution, OracleError> {
    let pixels: Vec<(i64, i64)> = sub.interior_pixels().collect();
    let n = pixels.len();
    if n > MAX_PIXELS {
        return Err(OracleError::TooLarge { subdomain: sub.id, pixels: n });
    }
    let index: HashMap<(i64, i64), usize> = pixels.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut triplets = Vec::with_capacity(5 * n);
    let mut rhs = Mat::<f64>::zeros(n, 3);
    let mut reaches = vec![false; n];
    for (i, &(x, y)) in pixels.iter().enumerate() {
        triplets.push(Triplet::new(i, i, 4.0));
        let f = sub.f_at(x, y);
        for c in 0..3 {
            rhs[(i, c)] = -f[c];
        }
        for (d, (dx, dy)) in DIRS.iter().enumerate() {
            let q = (x + dx, y + dy);
            if let Some(&j) = index.get(&q) {
                triplets.push(Triplet::new(i, j, -1.0));
            } else if let Some(s) = sub.face_sample(q, d ^ 1) {
                let g = sub.boundary_samples[s as usize].color;
                for c in 0..3 {
                    rhs[(i, c)] += g[c];
                }
                reaches[i] = true;
            } else {
                return Err(OracleError::Singular { subdomain: sub.id, count: 1 });
            }
        }
    }
    // every component must touch the boundary
    let mut stack: Vec<usize> = (0..n).filter(|&i| reaches[i]).collect();
    while let Some(i) = stack.pop() {
        let (x, y) = pixels[i];
        for (dx, dy) in DIRS {
            if let Some(&j) = index.get(&(x + dx, y + dy)) {
                if !reaches[j] {
                    reaches[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    let unreached = reaches.iter().filter(|r| !**r).count();
    if unreached > 0 {
        return Err(OracleError::Singular { subdomain: sub.id, count: unreached });
    }

    let mut u: [Vec<f64>; 3] = std::array::from_fn(|_| vec![0.0; sub.width * sub.height]);
    let mut residual: f64 = 0.0;
    if n > 0 {
        let fail = |reason: String| OracleError::Factorization { subdomain: sub.id, reason };
        let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets).map_err(|e| fail(format!("{e:?}")))?;
        let llt = mat.sp_cholesky(Side::Lower).map_err(|e| fail(format!("{e:?}")))?;
        let x = llt.solve(&rhs);
        let value = |p: (i64, i64), d: usize, c: usize| match index.get(&p) {
            Some(&j) => x[(j, c)],
            None => sub.boundary_samples[sub.face_sample(p, d ^ 1).unwrap() as usize].color[c],
        };
        for (i, &(px, py)) in pixels.iter().enumerate() {
            let li = (py - sub.y0) as usize * sub.width + (px - sub.x0) as usize;
            let f = sub.f_at(px, py);
            for c in 0..3 {
                u[c][li] = x[(i, c)];
                let sum: f64 = DIRS.iter().enumerate().map(|(d, (dx, dy))| value((px + dx, py + dy), d, c)).sum();
                residual = residual.max((sum - 4.0 * x[(i, c)] - f[c]).abs());
            }
        }
    }
    Ok(FdSolution {
        subdomain: sub.id,
        x0: sub.x0,
        y0: sub.y0,
        width: sub.width,
        height: sub.height,
        u,
        residual,
    })
}

/// Renders a document with the oracle in place of the spline solver, followed
/// by the same anti-aliasing pass.
pub fn fd_render(doc: &PvgDocument, width: usize, height: usize) -> Result<RasterImage, OracleError> {
    let errors: Vec<Diagnostic> = validate(doc).into_iter().filter(|d| d.is_error()).collect();
    if !errors.is_empty() {
        return Err(OracleError::Invalid(errors));
    }
    let part = discretize(doc, width, height);
    let solutions: Vec<Option<FdSolution>> = part
        .subdomains
        .par_iter()
        .map(|s| s.is_solvable().then(|| fd_solve(s)).transpose())
        .collect::<Result<_, _>>()?;
    let mut img = RasterImage::new(width, height, Viewport::canvas(doc));
    for y in 0..height {
        for x in 0..width {
            let (gx, gy) = (x as i64 + 1, y as i64 + 1);
            if part.kind_at(gx, gy) != PixelKind::Free {
                continue;
            }
            let v = solutions
                .get(part.label_at(gx, gy) as usize)
                .and_then(|s| s.as_ref())
                .and_then(|s| s.get(gx, gy))
                .unwrap_or(part.background);
            img.set(x, y, v);
        }
    }
    antialias(&mut img, &part, doc);
    Ok(img)
}

/// Mean absolute difference per channel as a percentage of the full range,
/// values clamped to [0, 1] as they would be when encoded.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ErrorReport {
    pub channels: [f64; 3],
}

impl ErrorReport {
    pub fn max(&self) -> f64 {
        self.channels.iter().copied().fold(0.0, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.channels.iter().sum::<f64>() / 3.0
    }
}

fn same_size(a: &RasterImage, b: &RasterImage) -> Result<(), OracleError> {
    if a.width != b.width || a.height != b.height {
        return Err(OracleError::DimensionMismatch(a.width, a.height, b.width, b.height));
    }
    Ok(())
}

pub fn relative_mean_error(a: &RasterImage, b: &RasterImage) -> Result<ErrorReport, OracleError> {
    same_size(a, b)?;
    let n = (a.width * a.height).max(1) as f64;
    let channels = std::array::from_fn(|c| {
        let sum: f64 = a.channels[c]
            .iter()
            .zip(&b.channels[c])
            .map(|(x, y)| (x.clamp(0.0, 1.0) - y.clamp(0.0, 1.0)).abs())
            .sum();
        100.0 * sum / n
    });
    Ok(ErrorReport { channels })
}

/// `|a − b| · gain` per channel.
pub fn error_map(a: &RasterImage, b: &RasterImage, gain: f64) -> Result<RasterImage, OracleError> {
    same_size(a, b)?;
    let mut out = RasterImage::new(a.width, a.height, a.viewport);
    for c in 0..3 {
        for (o, (x, y)) in out.channels[c].iter_mut().zip(a.channels[c].iter().zip(&b.channels[c])) {
            *o = (x.clamp(0.0, 1.0) - y.clamp(0.0, 1.0)).abs() * gain;
        }
    }
    Ok(out)
}

pub const ERROR_MAP_GAIN: f64 = 50.0;
