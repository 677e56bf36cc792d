use nalgebra::Point3;

use super::location::{chart_fragments, check_resolution};
use super::GridTensor;
use crate::atlas::UvAtlas;
use crate::distance::{SurfaceMetric, VertexGraph};
use crate::error::{Error, Result};
use crate::mesh::TriangleMesh;

/// Per-vertex weights `1 + alpha · d / max d`, where `d` is the edge-length
/// graph distance to the nearest seed on the uncut surface.
///
/// Seeds index original (uncut) vertices. Distances ignore the seam: the
/// graph is rebuilt over original vertices through the atlas seam map.
pub fn vertex_weights(open_mesh: &TriangleMesh, atlas: &UvAtlas, seeds: &[usize], alpha: f64) -> Result<Vec<f64>> {
    atlas.check_matches(open_mesh)?;
    if seeds.is_empty() {
        return Err(Error::invalid("weight map needs at least one seed vertex"));
    }
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::invalid(format!("alpha {alpha} must be finite and nonnegative")));
    }
    let n = atlas.original_vertex_count();
    if let Some(&s) = seeds.iter().find(|&&s| s >= n) {
        return Err(Error::invalid(format!("seed {s} out of range for {n} vertices")));
    }
    let map = atlas.seam_map();
    let mut positions = vec![Point3::origin(); n];
    for (open, &orig) in map.iter().enumerate().rev() {
        positions[orig] = open_mesh.positions()[open];
    }
    let edges: Vec<(usize, usize)> = open_mesh.edges().iter().map(|&(a, b)| (map[a], map[b])).collect();
    let graph = VertexGraph::from_edges(n, &positions, &edges, SurfaceMetric::EdgeLength);
    let dist = graph.distances_from(seeds);
    if let Some(v) = dist.iter().position(|d| !d.is_finite()) {
        return Err(Error::invalid(format!("vertex {v} is not reachable from any seed")));
    }
    let max = dist.iter().copied().fold(0.0, f64::max);
    let weights = dist
        .iter()
        .map(|&d| if max > 0.0 { 1.0 + alpha * d / max } else { 1.0 })
        .collect::<Vec<f64>>();
    Ok(map.iter().map(|&orig| weights[orig]).collect())
}

/// UV-space weight map: [`vertex_weights`] interpolated over the chart,
/// background texels 0.
pub fn weight_map(
    open_mesh: &TriangleMesh,
    atlas: &UvAtlas,
    seeds: &[usize],
    alpha: f64,
    height: usize,
    width: usize,
) -> Result<GridTensor> {
    check_resolution(height, width)?;
    let w = vertex_weights(open_mesh, atlas, seeds, alpha)?;
    let faces = open_mesh.faces();
    let data = chart_fragments(open_mesh, atlas, height, width)
        .into_iter()
        .map(|cell| match cell {
            Some(frag) => {
                let f = faces[frag.face];
                frag.bary[0] * w[f[0]] + frag.bary[1] * w[f[1]] + frag.bary[2] * w[f[2]]
            }
            None => 0.0,
        })
        .collect();
    GridTensor::from_data(height, width, 1, data)
}
