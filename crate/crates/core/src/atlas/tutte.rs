use std::f64::consts::PI;

use nalgebra::Point2;

use super::sparse::SparseSpd;
use super::UvAtlas;
use crate::error::{Error, Result};
use crate::mesh::TriangleMesh;

/// Convex outline the boundary loop is pinned to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    Square,
    #[default]
    Circle,
}

/// Uniform-weight harmonic embedding of an open disk mesh.
///
/// Boundary vertices are spread over the outline by 3D arc length, starting
/// at `(0.5, 0)` and running in the direction that gives faces positive signed
/// area. The start vertex is the lowest-index self-mirrored boundary vertex
/// when symmetric pairs are present, otherwise the lowest-index boundary
/// vertex. The `seam_map` of the result is the identity; callers that cut the
/// mesh attach their own.
pub fn tutte_embed(open_mesh: &TriangleMesh, boundary: Boundary) -> Result<UvAtlas> {
    open_mesh.ensure_connected()?;
    open_mesh.ensure_consistent_orientation()?;
    let loops = open_mesh.boundary_loops()?;
    if loops.len() != 1 {
        return Err(Error::Topology {
            euler: open_mesh.euler_characteristic(),
            boundary_loops: loops.len(),
        });
    }
    let mut ring = loops.into_iter().next().unwrap();
    if let Some(pairs) = open_mesh.symmetric_pairs() {
        if let Some(k) = ring
            .iter()
            .enumerate()
            .filter(|(_, &v)| pairs[v] == v)
            .min_by_key(|(_, &v)| v)
            .map(|(k, _)| k)
        {
            ring.rotate_left(k);
        }
    }

    let n = open_mesh.vertex_count();
    let pos = open_mesh.positions();
    let mut cumulative = Vec::with_capacity(ring.len());
    let mut total = 0.0;
    for k in 0..ring.len() {
        cumulative.push(total);
        total += (pos[ring[(k + 1) % ring.len()]] - pos[ring[k]]).norm();
    }
    if total <= 0.0 || !total.is_finite() {
        return Err(Error::Numerical("boundary loop has zero length".to_string()));
    }

    let mut uv = vec![Point2::new(0.0, 0.0); n];
    let mut on_boundary = vec![false; n];
    for (k, &v) in ring.iter().enumerate() {
        uv[v] = outline_point(boundary, cumulative[k] / total);
        on_boundary[v] = true;
    }

    // Interior system: deg(i)·x_i − Σ_{j interior} x_j = Σ_{j boundary} x_j.
    let adj = open_mesh.vertex_neighbors();
    let interior: Vec<usize> = (0..n).filter(|&v| !on_boundary[v]).collect();
    let mut slot = vec![usize::MAX; n];
    for (k, &v) in interior.iter().enumerate() {
        slot[v] = k;
    }
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(interior.len());
    let mut rhs_u = vec![0.0; interior.len()];
    let mut rhs_v = vec![0.0; interior.len()];
    for (k, &v) in interior.iter().enumerate() {
        if adj[v].is_empty() {
            return Err(Error::Numerical(format!(
                "vertex {v} is isolated; the harmonic system is singular"
            )));
        }
        let mut row = vec![(k, adj[v].len() as f64)];
        for &w in &adj[v] {
            if on_boundary[w] {
                rhs_u[k] += uv[w].x;
                rhs_v[k] += uv[w].y;
            } else {
                row.push((slot[w], -1.0));
            }
        }
        rows.push(row);
    }
    let system = SparseSpd { rows };
    let su = system.solve(&rhs_u)?;
    let sv = system.solve(&rhs_v)?;
    for (k, &v) in interior.iter().enumerate() {
        uv[v] = Point2::new(su[k].clamp(0.0, 1.0), sv[k].clamp(0.0, 1.0));
    }

    let atlas = UvAtlas::new(uv)?;
    let flipped = atlas.flipped_faces(open_mesh);
    if let Some(&f) = flipped.first() {
        return Err(Error::Numerical(format!(
            "embedding has {} non-positive faces (first: face {f}); \
             boundary faces with collinear corners need the circle outline",
            flipped.len()
        )));
    }
    Ok(atlas)
}

/// Point at fraction `t` ∈ [0, 1) of the outline perimeter.
fn outline_point(boundary: Boundary, t: f64) -> Point2<f64> {
    match boundary {
        Boundary::Circle => {
            let a = -PI / 2.0 + 2.0 * PI * t;
            Point2::new(0.5 + 0.5 * a.cos(), 0.5 + 0.5 * a.sin())
        }
        Boundary::Square => {
            // Perimeter 4, starting mid-edge at (0.5, 0).
            let s = (t * 4.0 + 0.5) % 4.0;
            let (side, f) = (s.floor() as usize, s - s.floor());
            match side {
                0 => Point2::new(f, 0.0),
                1 => Point2::new(1.0, f),
                2 => Point2::new(1.0 - f, 1.0),
                _ => Point2::new(0.0, 1.0 - f),
            }
        }
    }
}
