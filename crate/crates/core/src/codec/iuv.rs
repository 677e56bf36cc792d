use nalgebra::{Point2, Point3};

use super::raster::{rasterize, Fragment};
use crate::atlas::UvAtlas;
use crate::error::{Error, Result};
use crate::mesh::TriangleMesh;

/// Weak-perspective camera: `π(X) = s·(X_x, X_y) + t` in pixels. Depth is
/// orthographic and only orders visibility; +z points toward the camera.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Camera {
    scale: f64,
    translation: [f64; 2],
}

impl Camera {
    pub fn new(scale: f64, tx: f64, ty: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::invalid(format!("camera scale {scale} must be positive")));
        }
        if !(tx.is_finite() && ty.is_finite()) {
            return Err(Error::invalid("camera translation is not finite"));
        }
        Ok(Self {
            scale,
            translation: [tx, ty],
        })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn translation(&self) -> [f64; 2] {
        self.translation
    }

    pub fn project(&self, p: &Point3<f64>) -> Point2<f64> {
        Point2::new(
            self.scale * p.x + self.translation[0],
            self.scale * p.y + self.translation[1],
        )
    }

    /// Same camera shifted by `(dx, dy)` pixels.
    pub fn shifted(&self, dx: f64, dy: f64) -> Result<Self> {
        Self::new(self.scale, self.translation[0] + dx, self.translation[1] + dy)
    }
}

/// Per-pixel foreground probability and surface UV.
#[derive(Debug, Clone, PartialEq)]
pub struct IuvImage {
    height: usize,
    width: usize,
    fore: Vec<f64>,
    uv: Vec<Point2<f64>>,
}

impl IuvImage {
    pub fn new(height: usize, width: usize, fore: Vec<f64>, uv: Vec<Point2<f64>>) -> Result<Self> {
        if fore.len() != height * width || uv.len() != height * width {
            return Err(Error::shape(format!(
                "{} fore / {} uv entries for a {height}x{width} image",
                fore.len(),
                uv.len()
            )));
        }
        if let Some(i) = fore.iter().position(|f| !(0.0..=1.0).contains(f)) {
            return Err(Error::invalid(format!(
                "pixel {i} has foreground probability {} outside [0, 1]",
                fore[i]
            )));
        }
        if let Some(i) = uv.iter().position(|p| !(p.x.is_finite() && p.y.is_finite())) {
            return Err(Error::invalid(format!("pixel {i} has non-finite uv")));
        }
        Ok(Self {
            height,
            width,
            fore,
            uv,
        })
    }

    pub fn background(height: usize, width: usize) -> Self {
        Self {
            height,
            width,
            fore: vec![0.0; height * width],
            uv: vec![Point2::origin(); height * width],
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn fore(&self) -> &[f64] {
        &self.fore
    }

    pub fn uv(&self) -> &[Point2<f64>] {
        &self.uv
    }

    /// Pixel indices with `fore ≥ threshold`, in row-major order.
    pub fn foreground(&self, threshold: f64) -> impl Iterator<Item = usize> + '_ {
        self.fore
            .iter()
            .enumerate()
            .filter(move |(_, &f)| f >= threshold)
            .map(|(i, _)| i)
    }
}

/// Ground-truth IUV image of an open mesh seen through `camera`.
pub fn render_iuv(
    mesh: &TriangleMesh,
    atlas: &UvAtlas,
    camera: &Camera,
    height: usize,
    width: usize,
) -> Result<IuvImage> {
    render_iuv_with_faces(mesh, atlas, camera, height, width).map(|(img, _)| img)
}

/// Like [`render_iuv`], also returning the visible face of every pixel.
pub fn render_iuv_with_faces(
    mesh: &TriangleMesh,
    atlas: &UvAtlas,
    camera: &Camera,
    height: usize,
    width: usize,
) -> Result<(IuvImage, Vec<Option<usize>>)> {
    atlas.check_matches(mesh)?;
    let pos = mesh.positions();
    let projected: Vec<Point2<f64>> = pos.iter().map(|p| camera.project(p)).collect();
    let tris: Vec<[Point2<f64>; 3]> = mesh.faces().iter().map(|f| f.map(|i| projected[i])).collect();

    let mut cells: Vec<Option<(f64, Fragment)>> = vec![None; height * width];
    let faces = mesh.faces();
    rasterize(&tris, width, height, &mut cells, |cell, frag| {
        let f = faces[frag.face];
        let z = frag.bary[0] * pos[f[0]].z + frag.bary[1] * pos[f[1]].z + frag.bary[2] * pos[f[2]].z;
        // Strictly nearer wins; equal depth keeps the lower face index.
        match cell {
            Some((best, _)) if z <= *best => {}
            _ => *cell = Some((z, frag)),
        }
    });

    let uv = atlas.coords();
    let mut fore = vec![0.0; height * width];
    let mut uvs = vec![Point2::origin(); height * width];
    let mut visible = vec![None; height * width];
    for (i, cell) in cells.iter().enumerate() {
        if let Some((_, frag)) = cell {
            let f = faces[frag.face];
            let p = uv[f[0]].coords * frag.bary[0]
                + uv[f[1]].coords * frag.bary[1]
                + uv[f[2]].coords * frag.bary[2];
            fore[i] = 1.0;
            uvs[i] = Point2::from(p);
            visible[i] = Some(frag.face);
        }
    }
    Ok((IuvImage::new(height, width, fore, uvs)?, visible))
}
