//! Moving data between the mesh surface, UV space and image space.
//!
//! Grids are row-major. Texel `(r, c)` of an `H`×`W` UV grid covers
//! `[c/W, (c+1)/W) × [r/H, (r+1)/H)` and has its center at
//! `((c + 0.5)/W, (r + 0.5)/H)`. Image pixel `(r, c)` has its center at
//! `(c + 0.5, r + 0.5)` in the coordinates the camera projects to.

mod iuv;
mod location;
pub mod preview;
pub mod raster;
mod transfer;
mod weight;

pub use iuv::{render_iuv, render_iuv_with_faces, Camera, IuvImage};
pub use location::{decode_vertices, encode_location_map, reference_location_map, LocationMap};
pub use transfer::{transfer_to_image, transfer_to_uv, UvTransfer};
pub use weight::{vertex_weights, weight_map};

use crate::error::{Error, Result};

/// Smallest location-map side accepted by the encoder.
pub const MIN_MAP_SIDE: usize = 8;

/// Default foreground threshold for probabilistic IUV images.
pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// Dense `H`×`W`×`C` grid of scalars, row-major with interleaved channels.
#[derive(Debug, Clone, PartialEq)]
pub struct GridTensor {
    height: usize,
    width: usize,
    channels: usize,
    data: Vec<f64>,
}

impl GridTensor {
    pub fn zeros(height: usize, width: usize, channels: usize) -> Self {
        Self {
            height,
            width,
            channels,
            data: vec![0.0; height * width * channels],
        }
    }

    pub fn from_data(height: usize, width: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != height * width * channels {
            return Err(Error::shape(format!(
                "{} values for a {height}x{width}x{channels} grid",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("grid value {i} is not finite")));
        }
        Ok(Self {
            height,
            width,
            channels,
            data,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn pixel(&self, r: usize, c: usize) -> &[f64] {
        let i = (r * self.width + c) * self.channels;
        &self.data[i..i + self.channels]
    }

    pub fn pixel_mut(&mut self, r: usize, c: usize) -> &mut [f64] {
        let i = (r * self.width + c) * self.channels;
        &mut self.data[i..i + self.channels]
    }
}

pub(crate) fn check_threshold(threshold: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::invalid(format!(
            "foreground threshold {threshold} outside [0, 1]"
        )));
    }
    Ok(())
}
