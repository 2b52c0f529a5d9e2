//! Quadrature references for cell averages of the Green's function.

use pvg_core::geometry::Point;
use pvg_core::solver::greens_kernel;
use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on [0, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (x + 1.0), 0.5 * w));
    }
    out
}

fn panel(f: &impl Fn(f64) -> f64, a: f64, b: f64, rule: &[(f64, f64)]) -> f64 {
    rule.iter().map(|&(t, w)| w * (b - a) * f(a + t * (b - a))).sum()
}

/// Interval bisection until the two halves agree with their parent.
pub fn adaptive_1d(f: &impl Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32, rule: &[(f64, f64)]) -> f64 {
    let m = 0.5 * (a + b);
    let (l, r) = (panel(f, a, m, rule), panel(f, m, b, rule));
    if depth == 0 || (l + r - whole).abs() <= tol {
        return l + r;
    }
    adaptive_1d(f, a, m, l, 0.5 * tol, depth - 1, rule) + adaptive_1d(f, m, b, r, 0.5 * tol, depth - 1, rule)
}

fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rule: &[(f64, f64)]) -> f64 {
    let whole = panel(&f, a, b, rule);
    adaptive_1d(&f, a, b, whole, 1e-14 * whole.abs().max(1e-12), 24, rule)
}

/// ∬ ln r over [0, a] × [0, b] with the singular point at the origin corner,
/// integrated radially in closed form and in angle by quadrature.
pub fn corner_integral(a: f64, b: f64, rule: &[(f64, f64)]) -> f64 {
    if a <= 0.0 || b <= 0.0 {
        return 0.0;
    }
    let radial = |r: f64| if r > 0.0 { 0.5 * r * r * r.ln() - 0.25 * r * r } else { 0.0 };
    let split = (b / a).atan();
    integrate(|t| radial(a / t.cos()), 0.0, split, rule) + integrate(|t| radial(b / t.sin()), split, 0.5 * PI, rule)
}

/// Quadrature oracle for the mean of the kernel over a square.
pub fn square_mean(x: Point, center: Point, size: f64) -> f64 {
    let rule = gauss_legendre(20);
    let h = 0.5 * size;
    let (lo_x, hi_x) = (center.x - h - x.x, center.x + h - x.x);
    let (lo_y, hi_y) = (center.y - h - x.y, center.y + h - x.y);
    // split the square at x into signed corner rectangles
    let part = |lo: f64, hi: f64| -> Vec<(f64, f64)> {
        if lo >= 0.0 {
            vec![(hi, 1.0), (lo, -1.0)]
        } else if hi <= 0.0 {
            vec![(-lo, 1.0), (-hi, -1.0)]
        } else {
            vec![(hi, 1.0), (-lo, 1.0)]
        }
    };
    let mut s = 0.0;
    for (a, sa) in part(lo_x, hi_x) {
        for (b, sb) in part(lo_y, hi_y) {
            s += sa * sb * corner_integral(a, b, &rule);
        }
    }
    s / (2.0 * PI * size * size)
}

/// Tensor Gauss–Legendre on the square, for points well away from it.
pub fn smooth_mean(x: Point, center: Point, size: f64) -> f64 {
    let rule = gauss_legendre(24);
    let h = 0.5 * size;
    let mut s = 0.0;
    for &(tx, wx) in &rule {
        for &(ty, wy) in &rule {
            let y = Point::new(center.x - h + tx * size, center.y - h + ty * size);
            s += wx * wy * greens_kernel(x, y);
        }
    }
    s
}


fn tensor(x: Point, x0: f64, y0: f64, s: f64, rule: &[(f64, f64)]) -> f64 {
    let mut acc = 0.0;
    for &(tx, wx) in rule {
        for &(ty, wy) in rule {
            acc += wx * wy * greens_kernel(x, Point::new(x0 + tx * s, y0 + ty * s));
        }
    }
    acc * s * s
}

fn adaptive(x: Point, x0: f64, y0: f64, s: f64, whole: f64, tol: f64, depth: u32, rule: &[(f64, f64)]) -> f64 {
    let h = 0.5 * s;
    let quads = [(x0, y0), (x0 + h, y0), (x0, y0 + h), (x0 + h, y0 + h)];
    let parts: Vec<f64> = quads.iter().map(|&(a, b)| tensor(x, a, b, h, rule)).collect();
    let sum: f64 = parts.iter().sum();
    if depth == 0 || (sum - whole).abs() <= tol {
        return sum;
    }
    quads
        .iter()
        .zip(parts)
        .map(|(&(a, b), p)| adaptive(x, a, b, h, p, 0.25 * tol, depth - 1, rule))
        .sum()
}

/// Mean of the kernel over a square by adaptive subdivision, for points outside it.
pub fn adaptive_mean(x: Point, center: Point, size: f64) -> f64 {
    let rule = gauss_legendre(6);
    let (x0, y0) = (center.x - 0.5 * size, center.y - 0.5 * size);
    let whole = tensor(x, x0, y0, size, &rule);
    adaptive(x, x0, y0, size, whole, 1e-14 * size * size, 12, &rule) / (size * size)
}
