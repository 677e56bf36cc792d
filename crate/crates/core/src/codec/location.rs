use nalgebra::{Point2, Point3};
use rayon::prelude::*;

use super::raster::{rasterize, Fragment};
use super::MIN_MAP_SIDE;
use crate::atlas::UvAtlas;
use crate::error::{Error, Result};
use crate::mesh::TriangleMesh;

/// UV-space grid of 3D surface coordinates with a coverage mask.
#[derive(Debug, Clone, PartialEq)]
pub struct LocationMap {
    height: usize,
    width: usize,
    values: Vec<Point3<f64>>,
    mask: Vec<bool>,
}

impl LocationMap {
    pub fn new(height: usize, width: usize, values: Vec<Point3<f64>>, mask: Vec<bool>) -> Result<Self> {
        if values.len() != height * width || mask.len() != height * width {
            return Err(Error::shape(format!(
                "{} values / {} mask entries for a {height}x{width} map",
                values.len(),
                mask.len()
            )));
        }
        for (i, (v, &m)) in values.iter().zip(&mask).enumerate() {
            if m && !(v.x.is_finite() && v.y.is_finite() && v.z.is_finite()) {
                return Err(Error::invalid(format!("texel {i} is valid but not finite")));
            }
        }
        Ok(Self {
            height,
            width,
            values,
            mask,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn values(&self) -> &[Point3<f64>] {
        &self.values
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn value(&self, r: usize, c: usize) -> Option<Point3<f64>> {
        let i = r * self.width + c;
        self.mask[i].then(|| self.values[i])
    }

    pub fn valid_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Bilinear lookup at UV `(u, v)` over valid texels.
    ///
    /// Invalid or out-of-grid neighbors are dropped and the remaining weights
    /// renormalized; if no neighbor carries weight the nearest valid texel is
    /// returned. `None` only for a map without valid texels.
    pub fn sample(&self, u: f64, v: f64) -> Option<Point3<f64>> {
        let x = u * self.width as f64 - 0.5;
        let y = v * self.height as f64 - 0.5;
        let (x0, y0) = (x.floor(), y.floor());
        let (fx, fy) = (x - x0, y - y0);
        let (x0, y0) = (x0 as i64, y0 as i64);
        let mut acc = nalgebra::Vector3::zeros();
        let mut wsum = 0.0;
        for (dy, wy) in [(0, 1.0 - fy), (1, fy)] {
            for (dx, wx) in [(0, 1.0 - fx), (1, fx)] {
                let (r, c) = (y0 + dy, x0 + dx);
                if r < 0 || c < 0 || r >= self.height as i64 || c >= self.width as i64 {
                    continue;
                }
                let i = r as usize * self.width + c as usize;
                let w = wx * wy;
                if self.mask[i] && w > 0.0 {
                    acc += self.values[i].coords * w;
                    wsum += w;
                }
            }
        }
        if wsum > 0.0 {
            return Some(Point3::from(acc / wsum));
        }
        self.nearest_valid(x, y).map(|i| self.values[i])
    }

    /// Index of the valid texel whose center is closest to grid point `(x, y)`
    /// (texel-center coordinates); ties go to the lower index.
    fn nearest_valid(&self, x: f64, y: f64) -> Option<usize> {
        let (h, w) = (self.height as i64, self.width as i64);
        let cx = (x.round() as i64).clamp(0, w - 1);
        let cy = (y.round() as i64).clamp(0, h - 1);
        let mut best: Option<(f64, usize)> = None;
        let max_ring = h.max(w);
        for ring in 0..=max_ring {
            if let Some((d, _)) = best {
                // Every texel in this ring is at least (ring − 1) away.
                let reach = (ring as f64 - 1.0).max(0.0);
                if reach * reach > d {
                    break;
                }
            }
            for r in (cy - ring)..=(cy + ring) {
                for c in (cx - ring)..=(cx + ring) {
                    if (r - cy).abs() != ring && (c - cx).abs() != ring {
                        continue;
                    }
                    if r < 0 || c < 0 || r >= h || c >= w {
                        continue;
                    }
                    let i = (r * w + c) as usize;
                    if !self.mask[i] {
                        continue;
                    }
                    let d = (r as f64 - y).powi(2) + (c as f64 - x).powi(2);
                    match best {
                        Some((bd, bi)) if d > bd || (d == bd && i > bi) => {}
                        _ => best = Some((d, i)),
                    }
                }
            }
        }
        best.map(|(_, i)| i)
    }
}

/// First covering face (in index order) for each texel of an `H`×`W` grid.
pub(crate) fn chart_fragments(
    mesh: &TriangleMesh,
    atlas: &UvAtlas,
    height: usize,
    width: usize,
) -> Vec<Option<Fragment>> {
    let uv = atlas.coords();
    let (w, h) = (width as f64, height as f64);
    let tris: Vec<[Point2<f64>; 3]> = mesh
        .faces()
        .iter()
        .map(|f| f.map(|i| Point2::new(uv[i].x * w, uv[i].y * h)))
        .collect();
    let mut cells = vec![None; height * width];
    rasterize(&tris, width, height, &mut cells, |cell, frag| {
        if cell.is_none() {
            *cell = Some(frag);
        }
    });
    cells
}

pub(crate) fn check_resolution(height: usize, width: usize) -> Result<()> {
    if height < MIN_MAP_SIDE || width < MIN_MAP_SIDE {
        return Err(Error::invalid(format!(
            "location map resolution {height}x{width} is below {MIN_MAP_SIDE}x{MIN_MAP_SIDE}"
        )));
    }
    Ok(())
}

/// Rasterizes the mesh into UV space: every covered texel holds the
/// barycentric blend of its face's 3D corners.
pub fn encode_location_map(
    mesh: &TriangleMesh,
    atlas: &UvAtlas,
    height: usize,
    width: usize,
) -> Result<LocationMap> {
    check_resolution(height, width)?;
    atlas.check_matches(mesh)?;
    let cells = chart_fragments(mesh, atlas, height, width);
    let pos = mesh.positions();
    let faces = mesh.faces();
    let (values, mask): (Vec<Point3<f64>>, Vec<bool>) = cells
        .par_iter()
        .map(|cell| match cell {
            Some(frag) => {
                let f = faces[frag.face];
                let p = pos[f[0]].coords * frag.bary[0]
                    + pos[f[1]].coords * frag.bary[1]
                    + pos[f[2]].coords * frag.bary[2];
                (Point3::from(p), true)
            }
            None => (Point3::origin(), false),
        })
        .unzip();
    LocationMap::new(height, width, values, mask)
}

/// Location map of the template (rest-pose) mesh.
pub fn reference_location_map(
    template: &TriangleMesh,
    atlas: &UvAtlas,
    height: usize,
    width: usize,
) -> Result<LocationMap> {
    encode_location_map(template, atlas, height, width)
}

/// `V_i = X(u_i, v_i)` for every atlas vertex.
pub fn decode_vertices(map: &LocationMap, atlas: &UvAtlas) -> Result<Vec<Point3<f64>>> {
    if map.valid_count() == 0 {
        return Err(Error::invalid("location map has no valid texels"));
    }
    Ok(atlas
        .coords()
        .par_iter()
        .map(|uv| map.sample(uv.x, uv.y).expect("non-empty mask"))
        .collect())
}
