use rayon::prelude::*;

use super::{check_threshold, GridTensor, IuvImage, LocationMap};
use crate::error::{Error, Result};

/// Image features scattered into UV space: per-texel mean and hit count.
#[derive(Debug, Clone, PartialEq)]
pub struct UvTransfer {
    pub values: GridTensor,
    pub counts: Vec<u32>,
}

/// UV texel nearest to `(u·W, v·H)`, clamped onto the grid.
pub(crate) fn texel_of(u: f64, v: f64, height: usize, width: usize) -> (usize, usize) {
    let c = ((u * width as f64).floor().max(0.0) as usize).min(width - 1);
    let r = ((v * height as f64).floor().max(0.0) as usize).min(height - 1);
    (r, c)
}

/// Scatters every foreground pixel's feature vector to its UV texel and
/// averages collisions. Empty texels hold 0.
pub fn transfer_to_uv(
    image: &GridTensor,
    iuv: &IuvImage,
    height: usize,
    width: usize,
    threshold: f64,
) -> Result<UvTransfer> {
    check_threshold(threshold)?;
    if image.height() != iuv.height() || image.width() != iuv.width() {
        return Err(Error::shape(format!(
            "image is {}x{}, IUV image is {}x{}",
            image.height(),
            image.width(),
            iuv.height(),
            iuv.width()
        )));
    }
    if height == 0 || width == 0 {
        return Err(Error::invalid("output resolution must be positive"));
    }
    let ch = image.channels();
    let mut sums = vec![0.0; height * width * ch];
    let mut counts = vec![0u32; height * width];
    let uv = iuv.uv();
    for i in iuv.foreground(threshold) {
        let (r, c) = texel_of(uv[i].x, uv[i].y, height, width);
        let t = r * width + c;
        let src = &image.data()[i * ch..(i + 1) * ch];
        for (acc, x) in sums[t * ch..(t + 1) * ch].iter_mut().zip(src) {
            *acc += x;
        }
        counts[t] += 1;
    }
    for (t, &n) in counts.iter().enumerate() {
        if n > 1 {
            for acc in &mut sums[t * ch..(t + 1) * ch] {
                *acc /= n as f64;
            }
        }
    }
    Ok(UvTransfer {
        values: GridTensor::from_data(height, width, ch, sums)?,
        counts,
    })
}

/// Samples the location map at every foreground pixel's UV; background 0.
pub fn transfer_to_image(map: &LocationMap, iuv: &IuvImage, threshold: f64) -> Result<GridTensor> {
    check_threshold(threshold)?;
    let fg: Vec<bool> = iuv.fore().iter().map(|&f| f >= threshold).collect();
    if fg.iter().any(|&b| b) && map.valid_count() == 0 {
        return Err(Error::invalid("location map has no valid texels"));
    }
    let mut data = vec![0.0; iuv.height() * iuv.width() * 3];
    data.par_chunks_mut(3)
        .zip(iuv.uv().par_iter())
        .zip(fg.par_iter())
        .for_each(|((px, uv), &on)| {
            if on {
                let x = map.sample(uv.x, uv.y).expect("non-empty mask");
                px.copy_from_slice(&[x.x, x.y, x.z]);
            }
        });
    GridTensor::from_data(iuv.height(), iuv.width(), 3, data)
}
