//! Curve rasterization on the pixel grid.

use crate::geometry::Point;

/// Pixels crossed by the segment `a → b`, as a 4-connected chain. When the segment
/// passes exactly through a pixel corner both pixels flanking the corner are emitted.
pub fn supercover(a: Point, b: Point, mut emit: impl FnMut(i64, i64)) {
    let mut x = a.x.floor() as i64;
    let mut y = a.y.floor() as i64;
    let xe = b.x.floor() as i64;
    let ye = b.y.floor() as i64;
    emit(x, y);
    let d = b - a;
    let step_x: i64 = if d.x > 0.0 { 1 } else { -1 };
    let step_y: i64 = if d.y > 0.0 { 1 } else { -1 };
    let inv = |v: f64| if v != 0.0 { 1.0 / v.abs() } else { f64::INFINITY };
    let (dtx, dty) = (inv(d.x), inv(d.y));
    let next_boundary = |p: f64, cell: i64, step: i64| -> f64 {
        if step > 0 {
            (cell + 1) as f64 - p
        } else {
            p - cell as f64
        }
    };
    let mut tx = if d.x != 0.0 { next_boundary(a.x, x, step_x) * dtx } else { f64::INFINITY };
    let mut ty = if d.y != 0.0 { next_boundary(a.y, y, step_y) * dty } else { f64::INFINITY };
    // guard against a runaway loop from inconsistent floating point
    let max_steps = ((xe - x).abs() + (ye - y).abs() + 4) as usize;
    let mut steps = 0;
    while (x != xe || y != ye) && steps < max_steps {
        steps += 1;
        if tx > 1.0 && ty > 1.0 {
            break;
        }
        if (tx - ty).abs() < 1e-12 {
            // through a corner: include both side pixels to stay 4-connected
            emit(x + step_x, y);
            emit(x, y + step_y);
            x += step_x;
            y += step_y;
            tx += dtx;
            ty += dty;
        } else if tx < ty {
            x += step_x;
            tx += dtx;
        } else {
            y += step_y;
            ty += dty;
        }
        emit(x, y);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn collect(a: (f64, f64), b: (f64, f64)) -> Vec<(i64, i64)> {
        let mut v = Vec::new();
        supercover(Point::new(a.0, a.1), Point::new(b.0, b.1), |x, y| v.push((x, y)));
        v
    }

    /// Every pixel after the first touches an earlier one by a side.
    fn four_connected(v: &[(i64, i64)]) -> bool {
        (1..v.len()).all(|i| v[..i].iter().any(|p| (p.0 - v[i].0).abs() + (p.1 - v[i].1).abs() <= 1))
    }

    #[test]
    fn horizontal_run() {
        let v = collect((0.5, 2.5), (4.5, 2.5));
        assert_eq!(v, vec![(0, 2), (1, 2), (2, 2), (3, 2), (4, 2)]);
    }

    #[test]
    fn diagonal_through_corners_is_4_connected() {
        let v = collect((0.5, 0.5), (3.5, 3.5));
        assert!(four_connected(&v));
        let set: HashSet<_> = v.iter().copied().collect();
        for i in 0..4 {
            assert!(set.contains(&(i, i)));
        }
        assert!(set.contains(&(1, 0)) && set.contains(&(0, 1)));
    }

    #[test]
    fn every_crossed_pixel_is_covered() {
        // brute force: sample the segment densely and check each sample's pixel is emitted
        let cases = [((0.2, 0.3), (7.9, 3.1)), ((5.5, 0.1), (0.3, 6.7)), ((3.3, 3.3), (3.4, -2.2))];
        for (a, b) in cases {
            let v = collect(a, b);
            assert!(four_connected(&v), "{v:?}");
            let set: HashSet<_> = v.into_iter().collect();
            for k in 0..=2000 {
                let t = k as f64 / 2000.0;
                let p = Point::new(a.0 + (b.0 - a.0) * t, a.1 + (b.1 - a.1) * t);
                assert!(set.contains(&(p.x.floor() as i64, p.y.floor() as i64)));
            }
        }
    }
}
