use nalgebra::{Point2, Vector2};
use rayon::prelude::*;

use super::sparse::SparseSpd;
use super::{fit_unit_square, signed_area, UvAtlas};
use crate::error::{Error, Result};
use crate::mesh::TriangleMesh;

/// Diagonal shift of the gradient smoother, relative to unit edge weights.
const SMOOTHING_SHIFT: f64 = 1e-2;

/// Stretch every face may reach during descent; faces that start above it
/// are held to their initial stretch.
const STRETCH_CAP: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistortionConfig {
    pub max_iters: usize,
    /// Initial line-search step, as the largest vertex displacement in UV
    /// units.
    pub step: f64,
    /// Stop once an accepted step lowers the energy by less than this
    /// fraction.
    pub tolerance: f64,
}

impl Default for DistortionConfig {
    fn default() -> Self {
        Self {
            max_iters: 500,
            step: 1e-2,
            tolerance: 1e-7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistortionReport {
    pub energy_before: f64,
    pub energy_after: f64,
    pub iterations: usize,
    pub accepted_steps: usize,
}

/// Normalized area-distortion energy
/// `F · Σ_f (a_f^uv / Σ a^uv − a_f^3d / Σ a^3d)²` using signed UV areas.
pub fn area_distortion_energy(atlas: &UvAtlas, mesh: &TriangleMesh) -> Result<f64> {
    atlas.check_matches(mesh)?;
    let target = target_fractions(mesh)?;
    let energy = energy_of(atlas.coords(), mesh, &target);
    if !energy.is_finite() {
        return Err(non_finite(atlas.coords(), mesh));
    }
    Ok(energy)
}

/// Smoothed (Sobolev-style) projected gradient descent on the area
/// distortion energy. Every accepted step keeps all faces positively oriented,
/// all coordinates inside the unit square, and strictly lowers the energy.
///
/// Area alone says nothing about shape, so faces are also kept under a
/// stretch cap (largest Jacobian singular value of 4 once the chart is scaled
/// to the surface area, or the face's starting stretch if that is larger).
/// Corners of faces that would cross it are pinned for the rest of the line
/// search.
pub fn minimize_area_distortion(
    atlas: &UvAtlas,
    open_mesh: &TriangleMesh,
    config: &DistortionConfig,
) -> Result<(UvAtlas, DistortionReport)> {
    atlas.check_matches(open_mesh)?;
    if let Some(&f) = atlas.flipped_faces(open_mesh).first() {
        return Err(Error::invalid(format!(
            "input atlas has a flipped face ({f})"
        )));
    }
    let target = target_fractions(open_mesh)?;
    let mut coords = atlas.coords().to_vec();
    let mut energy = energy_of(&coords, open_mesh, &target);
    if !energy.is_finite() {
        return Err(non_finite(&coords, open_mesh));
    }
    let energy_before = energy;
    // The energy alone lets single faces collapse into slivers at almost no
    // cost, so the line search also caps each face's stretch.
    let grams = edge_grams(open_mesh);
    let total_3d: f64 = (0..open_mesh.face_count()).map(|f| open_mesh.face_area(f)).sum();
    let caps: Vec<f64> = stretches(&coords, open_mesh, &grams, total_3d)
        .into_iter()
        .map(|s| s.max(STRETCH_CAP))
        .collect();
    let mut step = config.step;
    let mut iterations = 0;
    let mut accepted_steps = 0;
    let mut candidate = coords.clone();
    let smoother = smoothing_operator(open_mesh);

    while iterations < config.max_iters && energy > 0.0 {
        iterations += 1;
        let mut direction = descent_direction(&coords, open_mesh, &target, &smoother)?;
        let mut accepted = false;
        while step > 1e-14 {
            for ((c, p), d) in candidate.iter_mut().zip(&coords).zip(&direction) {
                *c = p + d * step;
            }
            // The energy is scale invariant, so shrinking the chart back into
            // the unit square is free; per-vertex clamping would flatten
            // boundary ears instead.
            fit_unit_square(&mut candidate);
            let blocked = blocked_faces(&candidate, open_mesh, &grams, total_3d, &caps);
            if !blocked.is_empty() {
                // Pin the corners of faces that would leave their bounds and
                // let the rest of the chart keep moving.
                let faces = open_mesh.faces();
                let mut pinned = false;
                for f in blocked {
                    for &v in &faces[f] {
                        pinned |= direction[v] != Vector2::zeros();
                        direction[v] = Vector2::zeros();
                    }
                }
                if !pinned {
                    step *= 0.5;
                }
                continue;
            }
            let e = energy_of(&candidate, open_mesh, &target);
            if e < energy {
                let gain = (energy - e) / energy;
                std::mem::swap(&mut coords, &mut candidate);
                energy = e;
                accepted = true;
                accepted_steps += 1;
                step *= 2.0;
                if gain < config.tolerance {
                    return finish(atlas, coords, energy_before, energy, iterations, accepted_steps);
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    finish(atlas, coords, energy_before, energy, iterations, accepted_steps)
}

fn finish(
    atlas: &UvAtlas,
    coords: Vec<Point2<f64>>,
    energy_before: f64,
    energy_after: f64,
    iterations: usize,
    accepted_steps: usize,
) -> Result<(UvAtlas, DistortionReport)> {
    Ok((
        atlas.replace_coords(coords)?,
        DistortionReport {
            energy_before,
            energy_after,
            iterations,
            accepted_steps,
        },
    ))
}

fn target_fractions(mesh: &TriangleMesh) -> Result<Vec<f64>> {
    let areas: Vec<f64> = (0..mesh.face_count()).map(|f| mesh.face_area(f)).collect();
    if let Some(f) = areas.iter().position(|a| !(a.is_finite() && *a > 0.0)) {
        return Err(Error::Numerical(format!(
            "face {f} has degenerate 3D area {}",
            areas[f]
        )));
    }
    let total: f64 = areas.iter().sum();
    Ok(areas.into_iter().map(|a| a / total).collect())
}

fn uv_areas(coords: &[Point2<f64>], mesh: &TriangleMesh) -> Vec<f64> {
    mesh.faces()
        .par_iter()
        .map(|&[a, b, c]| signed_area(&coords[a], &coords[b], &coords[c]))
        .collect()
}

fn energy_of(coords: &[Point2<f64>], mesh: &TriangleMesh, target: &[f64]) -> f64 {
    let areas = uv_areas(coords, mesh);
    let total: f64 = areas.iter().sum();
    let sum: f64 = areas
        .iter()
        .zip(target)
        .map(|(a, t)| (a / total - t).powi(2))
        .sum();
    sum * mesh.face_count() as f64
}

fn non_finite(coords: &[Point2<f64>], mesh: &TriangleMesh) -> Error {
    let areas = uv_areas(coords, mesh);
    let f = areas.iter().position(|a| !a.is_finite()).unwrap_or(0);
    Error::Numerical(format!("area-distortion energy is not finite (face {f})"))
}

/// Per-face 3D Gram matrix `[e1·e1, e1·e2, e2·e2]` of the two edges at
/// the first corner.
fn edge_grams(mesh: &TriangleMesh) -> Vec<[f64; 3]> {
    let pos = mesh.positions();
    mesh.faces()
        .iter()
        .map(|&[a, b, c]| {
            let (e1, e2) = (pos[b] - pos[a], pos[c] - pos[a]);
            [e1.dot(&e1), e1.dot(&e2), e2.dot(&e2)]
        })
        .collect()
}

/// Largest singular value of each face's UV→3D Jacobian, measured after
/// scaling the chart to the surface's total area (1 for an isometry).
/// Faces without positive UV area report infinity.
fn stretches(coords: &[Point2<f64>], mesh: &TriangleMesh, grams: &[[f64; 3]], total_3d: f64) -> Vec<f64> {
    let areas = uv_areas(coords, mesh);
    let total: f64 = areas.iter().sum();
    let scale = total / total_3d;
    mesh.faces()
        .par_iter()
        .zip(grams.par_iter())
        .zip(areas.par_iter())
        .map(|((&[a, b, c], g), &area)| {
            if area <= 0.0 {
                return f64::INFINITY;
            }
            let (u1, u2) = (coords[b] - coords[a], coords[c] - coords[a]);
            // J^T J = M^-T G M^-1 with M = [u1 u2]; only trace and det are needed.
            let det_m = 2.0 * area;
            let (p, q, r) = (u2.y, -u2.x, -u1.y);
            let s = u1.x;
            // M^-1 = [[p, q], [r, s]] / det_m
            let k00 = p * p * g[0] + 2.0 * p * r * g[1] + r * r * g[2];
            let k11 = q * q * g[0] + 2.0 * q * s * g[1] + s * s * g[2];
            let k01 = p * q * g[0] + (p * s + q * r) * g[1] + r * s * g[2];
            let d2 = det_m * det_m;
            let (tr, det) = ((k00 + k11) / d2, (k00 * k11 - k01 * k01) / (d2 * d2));
            let lambda = 0.5 * (tr + (tr * tr - 4.0 * det).max(0.0).sqrt());
            (lambda * scale).sqrt()
        })
        .collect()
}

/// Faces that lost positive area or exceed their stretch cap.
// NaN stretch counts as blocked.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn blocked_faces(coords: &[Point2<f64>], mesh: &TriangleMesh, grams: &[[f64; 3]], total_3d: f64, caps: &[f64]) -> Vec<usize> {
    stretches(coords, mesh, grams, total_3d)
        .iter()
        .zip(caps)
        .enumerate()
        .filter(|(_, (s, cap))| !(s <= cap))
        .map(|(f, _)| f)
        .collect()
}

/// Area gradients of a face with respect to its three corners.
fn area_gradients(p: [&Point2<f64>; 3]) -> [Vector2<f64>; 3] {
    [
        Vector2::new(p[1].y - p[2].y, p[2].x - p[1].x) * 0.5,
        Vector2::new(p[2].y - p[0].y, p[0].x - p[2].x) * 0.5,
        Vector2::new(p[0].y - p[1].y, p[1].x - p[0].x) * 0.5,
    ]
}

/// Energy gradient per vertex. Per-face terms are computed in parallel and
/// scattered in face order.
fn energy_gradient(coords: &[Point2<f64>], mesh: &TriangleMesh, target: &[f64]) -> Vec<Vector2<f64>> {
    let areas = uv_areas(coords, mesh);
    let total: f64 = areas.iter().sum();
    let fcount = mesh.face_count() as f64;
    let residual: Vec<f64> = areas.iter().zip(target).map(|(a, t)| a / total - t).collect();
    let coupling: f64 = residual.iter().zip(&areas).map(|(r, a)| r * a).sum::<f64>() / (total * total);
    let terms: Vec<[Vector2<f64>; 3]> = mesh
        .faces()
        .par_iter()
        .zip(residual.par_iter())
        .map(|(&[a, b, c], &r)| {
            let dedarea = 2.0 * fcount * (r / total - coupling);
            area_gradients([&coords[a], &coords[b], &coords[c]]).map(|g| g * dedarea)
        })
        .collect();
    let mut grad = vec![Vector2::zeros(); coords.len()];
    for (f, g) in mesh.faces().iter().zip(terms) {
        for k in 0..3 {
            grad[f[k]] += g[k];
        }
    }
    grad
}

/// `(L + μI)` over the mesh graph, `L` the uniform (combinatorial)
/// Laplacian. Solving against it smooths the raw gradient so whole regions
/// move together instead of the smallest faces racing ahead and folding.
fn smoothing_operator(mesh: &TriangleMesh) -> SparseSpd {
    let rows = mesh
        .vertex_neighbors()
        .into_iter()
        .enumerate()
        .map(|(i, nbrs)| {
            let mut row = Vec::with_capacity(nbrs.len() + 1);
            row.push((i, nbrs.len() as f64 + SMOOTHING_SHIFT));
            row.extend(nbrs.into_iter().map(|j| (j, -1.0)));
            row
        })
        .collect();
    SparseSpd { rows }
}

/// Smoothed descent direction, scaled so the largest vertex move is 1.
fn descent_direction(
    coords: &[Point2<f64>],
    mesh: &TriangleMesh,
    target: &[f64],
    smoother: &SparseSpd,
) -> Result<Vec<Vector2<f64>>> {
    let grad = energy_gradient(coords, mesh, target);
    let gx: Vec<f64> = grad.iter().map(|g| -g.x).collect();
    let gy: Vec<f64> = grad.iter().map(|g| -g.y).collect();
    let (dx, dy) = rayon::join(|| smoother.solve(&gx), || smoother.solve(&gy));
    let (dx, dy) = (dx?, dy?);
    let dir: Vec<Vector2<f64>> = dx.into_iter().zip(dy).map(|(x, y)| Vector2::new(x, y)).collect();
    let max = dir.iter().map(|d| d.norm()).fold(0.0, f64::max);
    Ok(if max > 0.0 { dir.into_iter().map(|d| d / max).collect() } else { dir })
}
