//! Exact Euclidean distance transform (separable lower-envelope algorithm).

/// Binary image stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Bitmap {
    pub width: usize,
    pub height: usize,
    pub bits: Vec<bool>,
}

impl Bitmap {
    pub fn new(width: usize, height: usize) -> Self {
        Bitmap {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn get(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height && self.bits[y as usize * self.width + x as usize]
    }

    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.bits[y * self.width + x] = v;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Pixels of the mask with a 4-neighbour outside it (or outside the image).
    pub fn border_pixels(&self) -> Bitmap {
        let mut out = Bitmap::new(self.width, self.height);
        for y in 0..self.height {
            for x in 0..self.width {
                if !self.bits[y * self.width + x] {
                    continue;
                }
                let (xi, yi) = (x as i64, y as i64);
                let edge = !self.get(xi - 1, yi) || !self.get(xi + 1, yi) || !self.get(xi, yi - 1) || !self.get(xi, yi + 1);
                out.set(x, y, edge);
            }
        }
        out
    }
}

/// Squared distance from every pixel center to the nearest `feature` pixel center.
/// Pixels are `f64::INFINITY` when there are no features at all.
pub fn squared_distance_to(features: &Bitmap) -> Vec<f64> {
    let (w, h) = (features.width, features.height);
    let mut grid: Vec<f64> = features.bits.iter().map(|&b| if b { 0.0 } else { f64::INFINITY }).collect();
    let mut line = Vec::new();
    let mut out = Vec::new();
    for x in 0..w {
        line.clear();
        line.extend((0..h).map(|y| grid[y * w + x]));
        lower_envelope(&line, &mut out);
        for y in 0..h {
            grid[y * w + x] = out[y];
        }
    }
    for y in 0..h {
        line.clear();
        line.extend_from_slice(&grid[y * w..(y + 1) * w]);
        lower_envelope(&line, &mut out);
        grid[y * w..(y + 1) * w].copy_from_slice(&out);
    }
    grid
}

/// 1D transform `out[q] = min_p (q − p)² + f[p]`.
fn lower_envelope(f: &[f64], out: &mut Vec<f64>) {
    let n = f.len();
    out.clear();
    out.resize(n, f64::INFINITY);
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let mut k: isize = -1;
    for q in 0..n {
        if f[q].is_infinite() {
            continue;
        }
        let mut s;
        loop {
            if k < 0 {
                s = f64::NEG_INFINITY;
                break;
            }
            let p = v[k as usize];
            s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
            if s <= z[k as usize] {
                k -= 1;
            } else {
                break;
            }
        }
        k += 1;
        v[k as usize] = q;
        z[k as usize] = s;
        z[k as usize + 1] = f64::INFINITY;
    }
    if k < 0 {
        return;
    }
    let mut j = 0usize;
    for (q, o) in out.iter_mut().enumerate() {
        while z[j + 1] < q as f64 {
            j += 1;
        }
        let p = v[j];
        let d = q as f64 - p as f64;
        *o = d * d + f[p];
    }
}

/// Distance from each pixel of `mask` to the nearest border pixel of the mask
/// (0 on the border itself). Pixels outside the mask read 0.
pub fn euclidean_distance_transform(mask: &Bitmap) -> Vec<f64> {
    let border = mask.border_pixels();
    let sq = squared_distance_to(&border);
    sq.iter()
        .zip(&mask.bits)
        .map(|(&d, &m)| if m && d.is_finite() { d.sqrt() } else { 0.0 })
        .collect()
}
