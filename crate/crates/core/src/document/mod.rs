//! The PVG scene: diffusion curves, Poisson curves and Poisson regions on a canvas.
//!
//! Colors are linear-light floats in `[0, 1]`. Laplacian constraints use the same
//! color unit per squared canvas pixel; a value quoted on the 0–255 scale, such as
//! a Poisson curve with `f₊ = 41`, is stored as `41/255`.

mod format;
mod validate;

pub use format::{parse_document, serialize_document, FORMAT_VERSION};
pub use validate::{validate, DC_INTERSECTION_TOLERANCE};

use crate::geometry::Point;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Rgb = [f64; 3];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubicBSpline {
    pub control_points: Vec<Point>,
    pub closed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColorStop {
    pub t: f64,
    pub color: Rgb,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffusionCurve {
    pub spline: CubicBSpline,
    pub left_colors: Vec<ColorStop>,
    pub right_colors: Vec<ColorStop>,
}

/// Laplacian on the left strip of a Poisson curve; the right strip carries the negation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaplacianStop {
    pub t: f64,
    pub f_plus: Rgb,
}

impl LaplacianStop {
    /// The right-strip value. Never stored, so the pair always sums to zero.
    pub fn f_minus(&self) -> Rgb {
        self.f_plus.map(|v| -v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonCurve {
    pub spline: CubicBSpline,
    pub laplacian_stops: Vec<LaplacianStop>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonRegion {
    pub boundary: CubicBSpline,
    pub f_outer: Rgb,
    #[serde(default)]
    pub delta_outer: Rgb,
    #[serde(default)]
    pub delta_inner: Rgb,
    /// Reserved; only two bands are implemented.
    #[serde(default = "default_bands")]
    pub bands: u32,
}

fn default_bands() -> u32 {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Canvas {
    pub width: u32,
    pub height: u32,
    pub background: Rgb,
    /// When set, the canvas border is a Dirichlet boundary carrying `background`.
    #[serde(default = "default_border")]
    pub border: bool,
}

fn default_border() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq)]
pub struct PvgDocument {
    pub format_version: u32,
    pub canvas: Canvas,
    pub diffusion_curves: Vec<DiffusionCurve>,
    pub poisson_curves: Vec<PoissonCurve>,
    pub poisson_regions: Vec<PoissonRegion>,
}

impl PvgDocument {
    /// An empty scene whose border carries the background color.
    pub fn empty(width: u32, height: u32, background: Rgb) -> Self {
        PvgDocument {
            format_version: FORMAT_VERSION,
            canvas: Canvas {
                width,
                height,
                background,
                border: true,
            },
            diffusion_curves: Vec::new(),
            poisson_curves: Vec::new(),
            poisson_regions: Vec::new(),
        }
    }
}

impl Default for PvgDocument {
    fn default() -> Self {
        PvgDocument::empty(512, 512, [1.0, 1.0, 1.0])
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// Which primitive list a diagnostic refers to.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimitiveKind {
    Document,
    DiffusionCurve,
    PoissonCurve,
    PoissonRegion,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: String,
    pub message: String,
    pub kind: PrimitiveKind,
    pub primitive_index: usize,
}

impl Diagnostic {
    pub fn error(code: &str, kind: PrimitiveKind, index: usize, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code: code.to_string(),
            message: message.into(),
            kind,
            primitive_index: index,
        }
    }

    pub fn warning(code: &str, kind: PrimitiveKind, index: usize, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            ..Diagnostic::error(code, kind, index, message)
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        let kind = match self.kind {
            PrimitiveKind::Document => "document",
            PrimitiveKind::DiffusionCurve => "diffusion curve",
            PrimitiveKind::PoissonCurve => "poisson curve",
            PrimitiveKind::PoissonRegion => "poisson region",
        };
        write!(f, "{sev}[{}] {kind} #{}: {}", self.code, self.primitive_index, self.message)
    }
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("document is not valid UTF-8")]
    NotUtf8,
    #[error("malformed document: {0}")]
    Syntax(String),
    #[error("unsupported format version {0} (expected {FORMAT_VERSION})")]
    UnknownVersion(u32),
    #[error("{what} must have at least 4 control points, got {got}")]
    TooFewControlPoints { what: String, got: usize },
    #[error("PR boundary must be closed (poisson region #{0})")]
    OpenRegionBoundary(usize),
    #[error("{what}: stops must be sorted strictly increasing in t within [0, 1]")]
    StopsNotIncreasing { what: String },
    #[error("{what}: needs at least one stop")]
    NoStops { what: String },
    #[error("{what}: non-finite or out-of-range value")]
    BadValue { what: String },
    #[error("canvas dimensions must be positive")]
    EmptyCanvas,
}

/// Interpolates color stops at normalized parameter `t`. Closed curves wrap from the
/// last stop back to the first across `t = 1 ≡ 0`.
pub fn interpolate_stops<S>(stops: &[S], t: f64, closed: bool, value: impl Fn(&S) -> Rgb, at: impl Fn(&S) -> f64) -> Rgb {
    let n = stops.len();
    assert!(n > 0);
    if n == 1 {
        return value(&stops[0]);
    }
    let lerp = |a: Rgb, b: Rgb, w: f64| -> Rgb { [0, 1, 2].map(|c| a[c] + (b[c] - a[c]) * w) };
    let first = &stops[0];
    let last = &stops[n - 1];
    if t <= at(first) || t >= at(last) {
        if !closed {
            return if t <= at(first) { value(first) } else { value(last) };
        }
        let gap = at(first) + 1.0 - at(last);
        if gap <= 0.0 {
            return value(first);
        }
        let d = if t >= at(last) { t - at(last) } else { t + 1.0 - at(last) };
        return lerp(value(last), value(first), d / gap);
    }
    let hi = stops.partition_point(|s| at(s) <= t);
    let (a, b) = (&stops[hi - 1], &stops[hi]);
    let w = (t - at(a)) / (at(b) - at(a));
    lerp(value(a), value(b), w)
}

impl DiffusionCurve {
    pub fn color_at(&self, side: crate::geometry::Side, t: f64) -> Rgb {
        let stops = match side {
            crate::geometry::Side::Left => &self.left_colors,
            crate::geometry::Side::Right => &self.right_colors,
        };
        interpolate_stops(stops, t, self.spline.closed, |s| s.color, |s| s.t)
    }
}

impl PoissonCurve {
    pub fn f_plus_at(&self, t: f64) -> Rgb {
        interpolate_stops(&self.laplacian_stops, t, self.spline.closed, |s| s.f_plus, |s| s.t)
    }
}
