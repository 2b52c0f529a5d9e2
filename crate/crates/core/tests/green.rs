mod common;

use common::quadrature::*;
use pvg_core::geometry::Point;
use pvg_core::solver::{avg_greens, avg_greens_with, GreenMethod};
use std::f64::consts::PI;

#[test]
fn far_field_is_within_budget() {
    let c = Point::new(0.5, 0.5);
    let x = Point::new(100.5, 0.5);
    let (v, m) = avg_greens_with(x, c, 1.0);
    assert_eq!(m, GreenMethod::FarField);
    assert!((v - smooth_mean(x, c, 1.0)).abs() < 1e-4);
    assert!((v - 1.0 / (2.0 * PI) * 100f64.ln()).abs() < 1e-4);
    // just outside the switch radius, in every direction
    for k in 0..16 {
        let a = k as f64 * PI / 8.0 + 0.1;
        let x = Point::new(c.x + 4.01 * a.cos(), c.y + 4.01 * a.sin());
        assert!((avg_greens(x, c, 1.0) - smooth_mean(x, c, 1.0)).abs() < 1e-4);
    }
}

#[test]
fn center_of_unit_square() {
    let c = Point::new(0.5, 0.5);
    let v = avg_greens(c, c, 1.0);
    let q = square_mean(c, c, 1.0);
    assert!(v < 0.0);
    assert!((v - q).abs() < 1e-8, "{v} vs {q}");
    // mean of ln r over the unit square about its center
    assert!((v * 2.0 * PI + 1.06117542688252).abs() < 1e-12);
}

#[test]
fn analytic_branch_matches_quadrature() {
    let c = Point::new(3.0, -2.0);
    for &size in &[1.0, 2.0, 8.0] {
        for &(dx, dy) in &[(0.0, 0.0), (0.3, 0.1), (0.5, 0.5), (0.5, 0.0), (1.3, -0.7), (2.5, 3.0), (-3.9, 0.2)] {
            let x = Point::new(c.x + dx * size, c.y + dy * size);
            let (v, m) = avg_greens_with(x, c, size);
            assert_eq!(m, GreenMethod::Analytic);
            let q = square_mean(x, c, size);
            assert!((v - q).abs() < 1e-8, "size {size} at ({dx},{dy}): {v} vs {q}");
        }
    }
}


#[test]
fn adaptive_quadrature_agrees_with_the_smooth_rule() {
    let c = Point::new(0.0, 0.0);
    for &(x, y, s) in &[(4.5, 0.3, 1.0), (-9.0, 7.0, 2.0), (30.0, -41.0, 8.0)] {
        let p = Point::new(x, y);
        assert!((adaptive_mean(p, c, s) - smooth_mean(p, c, s)).abs() < 1e-12);
    }
}
