//! Continuous single-chart UV atlases: cutting, flattening, area-distortion
//! minimization, bilateral symmetrization and distance-matrix similarity.

mod cut;
mod distortion;
mod pipeline;
mod similarity;
mod sparse;
mod symmetry;
mod tutte;

pub use cut::{cut_mesh, CutMesh, SeamSpec};
pub use distortion::{area_distortion_energy, minimize_area_distortion, DistortionConfig, DistortionReport};
pub use pipeline::{build_continuous_atlas, AtlasConfig, ContinuousAtlas};
pub use similarity::{similarity_s1, similarity_s2};
pub use symmetry::{fit_symmetry_axis, mirror_residual, symmetrize_atlas, SymmetryAxis};
pub use tutte::{tutte_embed, Boundary};

use nalgebra::{Point2, Point3};

use crate::error::{Error, Result};
use crate::mesh::TriangleMesh;

/// Per-vertex coordinates in the unit UV square plus the open-to-original
/// vertex map produced by cutting (identity for meshes that were not cut).
#[derive(Debug, Clone, PartialEq)]
pub struct UvAtlas {
    coords: Vec<Point2<f64>>,
    seam_map: Vec<usize>,
}

impl UvAtlas {
    /// Atlas over an uncut mesh: `seam_map` is the identity.
    pub fn new(coords: Vec<Point2<f64>>) -> Result<Self> {
        let seam_map = (0..coords.len()).collect();
        Self::with_seam_map(coords, seam_map)
    }

    pub fn with_seam_map(coords: Vec<Point2<f64>>, seam_map: Vec<usize>) -> Result<Self> {
        if coords.len() != seam_map.len() {
            return Err(Error::shape(format!(
                "{} UV coordinates but {} seam-map entries",
                coords.len(),
                seam_map.len()
            )));
        }
        for (i, p) in coords.iter().enumerate() {
            if !(p.x.is_finite() && p.y.is_finite())
                || p.x < 0.0
                || p.x > 1.0
                || p.y < 0.0
                || p.y > 1.0
            {
                return Err(Error::invalid(format!(
                    "UV coordinate {i} = ({}, {}) outside the unit square",
                    p.x, p.y
                )));
            }
        }
        Ok(Self { coords, seam_map })
    }

    pub fn coords(&self) -> &[Point2<f64>] {
        &self.coords
    }

    pub fn seam_map(&self) -> &[usize] {
        &self.seam_map
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Number of vertices of the original (uncut) mesh this atlas refers to.
    pub fn original_vertex_count(&self) -> usize {
        self.seam_map.iter().map(|&i| i + 1).max().unwrap_or(0)
    }

    pub(crate) fn replace_coords(&self, coords: Vec<Point2<f64>>) -> Result<Self> {
        Self::with_seam_map(coords, self.seam_map.clone())
    }

    /// One UV coordinate per original vertex: the lowest-index open copy.
    pub fn per_original_vertex(&self) -> Vec<Point2<f64>> {
        let n = self.original_vertex_count();
        let mut out: Vec<Option<Point2<f64>>> = vec![None; n];
        for (open, &orig) in self.seam_map.iter().enumerate() {
            out[orig].get_or_insert(self.coords[open]);
        }
        out.into_iter()
            .map(|p| p.unwrap_or_else(Point2::origin))
            .collect()
    }

    /// Signed UV area of each face of `mesh`.
    pub fn signed_areas(&self, mesh: &TriangleMesh) -> Vec<f64> {
        mesh.faces()
            .iter()
            .map(|&[a, b, c]| signed_area(&self.coords[a], &self.coords[b], &self.coords[c]))
            .collect()
    }

    /// Indices of faces with non-positive signed UV area.
    pub fn flipped_faces(&self, mesh: &TriangleMesh) -> Vec<usize> {
        self.signed_areas(mesh)
            .iter()
            .enumerate()
            .filter(|(_, &a)| a <= 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    pub(crate) fn check_matches(&self, mesh: &TriangleMesh) -> Result<()> {
        if self.len() != mesh.vertex_count() {
            return Err(Error::shape(format!(
                "atlas has {} coordinates, mesh has {} vertices",
                self.len(),
                mesh.vertex_count()
            )));
        }
        Ok(())
    }
}

/// Positions for an open (cut) mesh taken from a mesh with the original
/// connectivity, e.g. a posed copy of the closed template.
pub fn lift_positions(
    open_mesh: &TriangleMesh,
    atlas: &UvAtlas,
    original_positions: &[Point3<f64>],
) -> Result<TriangleMesh> {
    atlas.check_matches(open_mesh)?;
    if original_positions.len() < atlas.original_vertex_count() {
        return Err(Error::shape(format!(
            "{} original positions, seam map references {}",
            original_positions.len(),
            atlas.original_vertex_count()
        )));
    }
    let positions = atlas
        .seam_map()
        .iter()
        .map(|&orig| original_positions[orig])
        .collect();
    open_mesh.with_positions(positions)
}

/// Scales about `(0.5, v_mid)` and shifts in v so every point lies in the
/// unit square. Leaves in-range point sets untouched.
pub(crate) fn fit_unit_square(points: &mut [Point2<f64>]) {
    let (mut umin, mut umax, mut vmin, mut vmax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in points.iter() {
        umin = umin.min(p.x);
        umax = umax.max(p.x);
        vmin = vmin.min(p.y);
        vmax = vmax.max(p.y);
    }
    if umin >= 0.0 && umax <= 1.0 && vmin >= 0.0 && vmax <= 1.0 {
        return;
    }
    let half_width = (umax - 0.5).max(0.5 - umin);
    let scale = (0.5 / half_width).min(1.0 / (vmax - vmin)).min(1.0);
    let vmid = 0.5 * (vmin + vmax);
    for p in points.iter_mut() {
        p.x = 0.5 + (p.x - 0.5) * scale;
        p.y = vmid + (p.y - vmid) * scale;
    }
    let (lo, hi) = (
        vmid - 0.5 * scale * (vmax - vmin),
        vmid + 0.5 * scale * (vmax - vmin),
    );
    let dv = if lo < 0.0 {
        -lo
    } else if hi > 1.0 {
        1.0 - hi
    } else {
        0.0
    };
    for p in points.iter_mut() {
        p.x = p.x.clamp(0.0, 1.0);
        p.y = (p.y + dv).clamp(0.0, 1.0);
    }
}

pub(crate) fn signed_area(a: &Point2<f64>, b: &Point2<f64>, c: &Point2<f64>) -> f64 {
    0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_coords() {
        assert!(UvAtlas::new(vec![Point2::new(0.5, 1.2)]).is_err());
        assert!(UvAtlas::new(vec![Point2::new(f64::NAN, 0.1)]).is_err());
        assert!(UvAtlas::new(vec![Point2::new(0.0, 1.0)]).is_ok());
    }

    #[test]
    fn per_original_vertex_takes_first_copy() {
        let atlas = UvAtlas::with_seam_map(
            vec![
                Point2::new(0.1, 0.1),
                Point2::new(0.2, 0.2),
                Point2::new(0.9, 0.9),
            ],
            vec![0, 1, 0],
        )
        .unwrap();
        let per = atlas.per_original_vertex();
        assert_eq!(per, vec![Point2::new(0.1, 0.1), Point2::new(0.2, 0.2)]);
    }
}
