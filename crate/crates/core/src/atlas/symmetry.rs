use nalgebra::{Point2, Rotation2, Vector2};

use super::{fit_unit_square, UvAtlas};
use crate::error::{Error, Result};
use crate::mesh::TriangleMesh;

/// Least-squares bilateral symmetry line of a paired UV point set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryAxis {
    /// A point on the axis (the centroid of the point set).
    pub origin: Point2<f64>,
    /// Direction angle of the axis, in (−π/2, π/2].
    pub angle: f64,
}

/// Fits the reflection line that best maps every point onto its partner.
///
/// A reflection about a line through the centroid with direction angle `α`
/// is the orthogonal map `[[cos 2α, sin 2α], [sin 2α, −cos 2α]]`; maximizing
/// Σ q_i · Ref(p_i) over centered points gives `2α = atan2(B, A)` with
/// `A = Σ q_x p_x − q_y p_y` and `B = Σ q_x p_y + q_y p_x`.
pub fn fit_symmetry_axis(coords: &[Point2<f64>], pairs: &[usize]) -> Result<SymmetryAxis> {
    if coords.len() != pairs.len() || coords.is_empty() {
        return Err(Error::shape(format!(
            "{} coordinates, {} symmetric pairs",
            coords.len(),
            pairs.len()
        )));
    }
    let n = coords.len() as f64;
    let centroid = Point2::from(coords.iter().map(|p| p.coords).sum::<Vector2<f64>>() / n);
    let (mut a, mut b) = (0.0, 0.0);
    for (i, p) in coords.iter().enumerate() {
        let p = p - centroid;
        let q = coords[pairs[i]] - centroid;
        a += q.x * p.x - q.y * p.y;
        b += q.x * p.y + q.y * p.x;
    }
    // atan2 ∈ (−π, π], so the half angle lies in (−π/2, π/2].
    let angle = if a == 0.0 && b == 0.0 {
        std::f64::consts::FRAC_PI_2
    } else {
        0.5 * b.atan2(a)
    };
    Ok(SymmetryAxis {
        origin: centroid,
        angle,
    })
}

/// Largest deviation from the exact mirror relation `u_i = 1 − u_j`,
/// `v_i = v_j` over all pairs.
pub fn mirror_residual(coords: &[Point2<f64>], pairs: &[usize]) -> f64 {
    coords
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let q = coords[pairs[i]];
            (p.x - (1.0 - q.x)).abs().max((p.y - q.y).abs())
        })
        .fold(0.0, f64::max)
}

/// Aligns the fitted symmetry axis with `u = 0.5`, then averages each
/// coordinate with its partner's mirror image. The result is rescaled about
/// the axis only if it would leave the unit square.
pub fn symmetrize_atlas(atlas: &UvAtlas, mesh: &TriangleMesh) -> Result<UvAtlas> {
    atlas.check_matches(mesh)?;
    let pairs = mesh
        .symmetric_pairs()
        .ok_or_else(|| Error::invalid("mesh has no symmetric pairs"))?;
    let coords = atlas.coords();
    let axis = fit_symmetry_axis(coords, pairs)?;

    let mut turn = std::f64::consts::FRAC_PI_2 - axis.angle;
    if turn > std::f64::consts::FRAC_PI_2 {
        turn -= std::f64::consts::PI;
    }
    let rot = Rotation2::new(turn);
    let shift = Vector2::new(0.5 - axis.origin.x, 0.0);
    let aligned: Vec<Point2<f64>> = coords
        .iter()
        .map(|p| axis.origin + rot * (p - axis.origin) + shift)
        .collect();

    let mut out: Vec<Point2<f64>> = aligned
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let q = aligned[pairs[i]];
            Point2::new(0.5 * (p.x + 1.0 - q.x), 0.5 * (p.y + q.y))
        })
        .collect();

    fit_unit_square(&mut out);
    atlas.replace_coords(out)
}
