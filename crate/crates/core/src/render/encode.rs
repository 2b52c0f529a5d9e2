//! Quantization and PNG output. Linear values are written as-is, clamped to [0, 1].

use super::RasterImage;
use image::{ImageBuffer, ImageFormat, Rgb as Px};
use std::io::Cursor;
use std::path::Path;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Default)]
pub enum BitDepth {
    #[default]
    Eight,
    Sixteen,
}

pub fn quantize_8(v: f64) -> u8 {
    let v = if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
    (v * 255.0 + 0.5).floor() as u8
}

pub fn quantize_16(v: f64) -> u16 {
    let v = if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
    (v * 65535.0 + 0.5).floor() as u16
}

pub fn encode_png(img: &RasterImage, depth: BitDepth) -> Vec<u8> {
    let (w, h) = (img.width as u32, img.height as u32);
    let mut out = Cursor::new(Vec::new());
    let res = match depth {
        BitDepth::Eight => ImageBuffer::<Px<u8>, _>::from_fn(w, h, |x, y| Px(img.get(x as usize, y as usize).map(quantize_8))).write_to(&mut out, ImageFormat::Png),
        BitDepth::Sixteen => ImageBuffer::<Px<u16>, _>::from_fn(w, h, |x, y| Px(img.get(x as usize, y as usize).map(quantize_16))).write_to(&mut out, ImageFormat::Png),
    };
    res.expect("PNG encoding into memory");
    out.into_inner()
}

pub fn write_png(img: &RasterImage, path: &Path, depth: BitDepth) -> std::io::Result<()> {
    std::fs::write(path, encode_png(img, depth))
}
