//! Free-space Green's function of the 2D Laplacian and its cell averages.

use crate::geometry::Point;
use std::f64::consts::PI;

/// Beyond this many cell sizes from the center the point-source value is used.
pub const FAR_FIELD_RATIO: f64 = 4.0;

const INV_2PI: f64 = 0.5 / PI;

/// `(1/2π) ln |x − y|`; undefined for `x = y`.
pub fn greens_kernel(x: Point, y: Point) -> f64 {
    INV_2PI * x.dist(y).ln()
}

/// Which formula produced a cell average.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum GreenMethod {
    Analytic,
    FarField,
}

/// Mean of the kernel over the axis-aligned square of side `size` centered at `center`.
pub fn avg_greens(x: Point, center: Point, size: f64) -> f64 {
    avg_greens_with(x, center, size).0
}

pub fn avg_greens_with(x: Point, center: Point, size: f64) -> (f64, GreenMethod) {
    let dx = center.x - x.x;
    let dy = center.y - x.y;
    let r2 = dx * dx + dy * dy;
    let far = FAR_FIELD_RATIO * size;
    if r2 > far * far {
        return (0.5 * INV_2PI * r2.ln(), GreenMethod::FarField);
    }
    let h = 0.5 * size;
    let (u0, u1) = (dx - h, dx + h);
    let (v0, v1) = (dy - h, dy + h);
    let integral = antiderivative(u1, v1) - antiderivative(u0, v1) - antiderivative(u1, v0) + antiderivative(u0, v0);
    (INV_2PI * integral / (size * size), GreenMethod::Analytic)
}

/// `F(u, v)` with `∂²F/∂u∂v = ln √(u² + v²)`.
fn antiderivative(u: f64, v: f64) -> f64 {
    let r2 = u * u + v * v;
    if r2 == 0.0 {
        return 0.0;
    }
    let mut f = u * v * (r2.ln() - 3.0);
    if u != 0.0 {
        f += u * u * (v / u).atan();
    }
    if v != 0.0 {
        f += v * v * (u / v).atan();
    }
    0.5 * f
}
