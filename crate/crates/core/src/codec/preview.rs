//! 8-bit PNG visualizations. Lossy: for inspection only.

use std::path::Path;

use image::{Rgb, RgbImage};

use super::{GridTensor, IuvImage, LocationMap};
use crate::error::{Error, Result};

fn to_byte(x: f64) -> u8 {
    (x.clamp(0.0, 1.0) * 255.0).round() as u8
}

fn save(img: &RgbImage, path: &Path) -> Result<()> {
    img.save(path).map_err(|e| match e {
        image::ImageError::IoError(source) => Error::io(path, source),
        other => Error::Container(format!("{}: {other}", path.display())),
    })
}

/// u → red, v → green, foreground probability → blue.
pub fn iuv_image(iuv: &IuvImage) -> RgbImage {
    let w = iuv.width();
    RgbImage::from_fn(w as u32, iuv.height() as u32, |x, y| {
        let i = y as usize * w + x as usize;
        let f = iuv.fore()[i];
        let uv = iuv.uv()[i];
        if f > 0.0 {
            Rgb([to_byte(uv.x), to_byte(uv.y), to_byte(f)])
        } else {
            Rgb([0, 0, 0])
        }
    })
}

/// xyz → rgb, each channel normalized to its range over valid texels.
pub fn location_image(map: &LocationMap) -> RgbImage {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for (p, _) in map.values().iter().zip(map.mask()).filter(|(_, &m)| m) {
        for k in 0..3 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let w = map.width();
    RgbImage::from_fn(w as u32, map.height() as u32, |x, y| {
        let i = y as usize * w + x as usize;
        if !map.mask()[i] {
            return Rgb([0, 0, 0]);
        }
        let p = map.values()[i];
        Rgb(std::array::from_fn(|k| {
            let span = hi[k] - lo[k];
            to_byte(if span > 0.0 { (p[k] - lo[k]) / span } else { 0.5 })
        }))
    })
}

/// First channel scaled by its maximum, as gray.
pub fn grid_image(grid: &GridTensor) -> RgbImage {
    let max = grid
        .data()
        .iter()
        .step_by(grid.channels().max(1))
        .copied()
        .fold(0.0, f64::max);
    RgbImage::from_fn(grid.width() as u32, grid.height() as u32, |x, y| {
        let v = grid.pixel(y as usize, x as usize).first().copied().unwrap_or(0.0);
        let g = to_byte(if max > 0.0 { v / max } else { 0.0 });
        Rgb([g, g, g])
    })
}

pub fn save_iuv_png(iuv: &IuvImage, path: impl AsRef<Path>) -> Result<()> {
    save(&iuv_image(iuv), path.as_ref())
}

pub fn save_location_png(map: &LocationMap, path: impl AsRef<Path>) -> Result<()> {
    save(&location_image(map), path.as_ref())
}

pub fn save_grid_png(grid: &GridTensor, path: impl AsRef<Path>) -> Result<()> {
    save(&grid_image(grid), path.as_ref())
}
