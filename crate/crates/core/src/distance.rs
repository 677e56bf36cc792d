//! Vertex-to-vertex distance matrices on the mesh graph and in UV space.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::{Point2, Point3};
use rayon::prelude::*;

use crate::atlas::UvAtlas;
use crate::error::{Error, Result};
use crate::mesh::TriangleMesh;

/// Largest vertex subset for which a dense matrix is built.
pub const MAX_DENSE_VERTICES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SurfaceMetric {
    /// Euclidean edge lengths.
    #[default]
    EdgeLength,
    /// Every edge has weight 1.
    HopCount,
}

/// Dense symmetric `n`×`n` matrix over a subset of mesh vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    vertices: Vec<usize>,
    values: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_values(vertices: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        let n = vertices.len();
        if values.len() != n * n {
            return Err(Error::shape(format!(
                "{} values for a {n}x{n} distance matrix",
                values.len()
            )));
        }
        Ok(Self { vertices, values })
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    /// Mesh vertex index of each row.
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Row-major values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.n();
        &self.values[i * n..(i + 1) * n]
    }
}

#[derive(Clone, Copy, PartialEq)]
struct State {
    dist: f64,
    vertex: usize,
}

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Weighted undirected vertex graph in adjacency-list form.
#[derive(Debug, Clone)]
pub struct VertexGraph {
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl VertexGraph {
    pub fn from_mesh(mesh: &TriangleMesh, metric: SurfaceMetric) -> Self {
        Self::from_edges(mesh.vertex_count(), mesh.positions(), &mesh.edges(), metric)
    }

    /// Graph over `positions.len()` vertices; duplicate edges are merged.
    pub fn from_edges(
        n: usize,
        positions: &[Point3<f64>],
        edges: &[(usize, usize)],
        metric: SurfaceMetric,
    ) -> Self {
        let mut edges: Vec<(usize, usize)> = edges
            .iter()
            .filter(|(a, b)| a != b)
            .map(|&(a, b)| (a.min(b), a.max(b)))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        let mut adjacency = vec![Vec::new(); n];
        for (a, b) in edges {
            let w = match metric {
                SurfaceMetric::EdgeLength => (positions[a] - positions[b]).norm(),
                SurfaceMetric::HopCount => 1.0,
            };
            adjacency[a].push((b, w));
            adjacency[b].push((a, w));
        }
        Self { adjacency }
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    /// Shortest-path distances from the nearest of `sources`; unreachable
    /// vertices get `f64::INFINITY`.
    pub fn distances_from(&self, sources: &[usize]) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.adjacency.len()];
        let mut heap = BinaryHeap::new();
        for &s in sources {
            dist[s] = 0.0;
            heap.push(State {
                dist: 0.0,
                vertex: s,
            });
        }
        while let Some(State { dist: d, vertex: v }) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            for &(w, len) in &self.adjacency[v] {
                let nd = d + len;
                if nd < dist[w] {
                    dist[w] = nd;
                    heap.push(State {
                        dist: nd,
                        vertex: w,
                    });
                }
            }
        }
        dist
    }
}

/// All-pairs graph distances over every vertex.
pub fn surface_distance_matrix(mesh: &TriangleMesh, metric: SurfaceMetric) -> Result<DistanceMatrix> {
    if mesh.vertex_count() > MAX_DENSE_VERTICES {
        return Err(Error::invalid(format!(
            "{} vertices exceeds the dense limit of {MAX_DENSE_VERTICES}; pass a sampling stride",
            mesh.vertex_count()
        )));
    }
    surface_distance_matrix_sampled(mesh, metric, 1)
}

/// Graph distances between vertices `0, stride, 2·stride, …`.
pub fn surface_distance_matrix_sampled(
    mesh: &TriangleMesh,
    metric: SurfaceMetric,
    stride: usize,
) -> Result<DistanceMatrix> {
    let vertices = sample_indices(mesh.vertex_count(), stride)?;
    mesh.ensure_connected()?;
    let graph = VertexGraph::from_mesh(mesh, metric);
    let rows: Vec<Vec<f64>> = vertices
        .par_iter()
        .map(|&s| {
            let d = graph.distances_from(&[s]);
            vertices.iter().map(|&t| d[t]).collect()
        })
        .collect();
    let mut values = rows.concat();
    // Dijkstra from i and from j can round a path sum differently; keep the
    // matrix exactly symmetric.
    let n = vertices.len();
    for i in 0..n {
        for j in i + 1..n {
            let m = values[i * n + j].min(values[j * n + i]);
            values[i * n + j] = m;
            values[j * n + i] = m;
        }
    }
    DistanceMatrix::from_values(vertices, values)
}

/// Euclidean distances between the atlas coordinates of all vertices.
pub fn uv_distance_matrix(atlas: &UvAtlas) -> Result<DistanceMatrix> {
    uv_distance_matrix_sampled(atlas.coords(), 1)
}

/// Euclidean distances between `coords[0], coords[stride], …`.
pub fn uv_distance_matrix_sampled(coords: &[Point2<f64>], stride: usize) -> Result<DistanceMatrix> {
    let vertices = sample_indices(coords.len(), stride)?;
    let values: Vec<f64> = vertices
        .par_iter()
        .flat_map_iter(|&i| vertices.iter().map(move |&j| (coords[i] - coords[j]).norm()))
        .collect();
    DistanceMatrix::from_values(vertices, values)
}

fn sample_indices(n: usize, stride: usize) -> Result<Vec<usize>> {
    if stride == 0 {
        return Err(Error::invalid("sampling stride must be at least 1"));
    }
    let vertices: Vec<usize> = (0..n).step_by(stride).collect();
    if vertices.len() > MAX_DENSE_VERTICES {
        return Err(Error::invalid(format!(
            "{} sampled vertices exceeds the dense limit of {MAX_DENSE_VERTICES}",
            vertices.len()
        )));
    }
    Ok(vertices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::fixtures::*;

    #[test]
    fn tetrahedron_edge_lengths_are_one() {
        let d = surface_distance_matrix(&tetrahedron(), SurfaceMetric::EdgeLength).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 0.0 } else { 1.0 };
                assert!((d.get(i, j) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn octahedron_hops() {
        let d = surface_distance_matrix(&octahedron(), SurfaceMetric::HopCount).unwrap();
        // Antipodal pairs are two hops apart, everything else one.
        assert_eq!(d.get(0, 1), 2.0);
        assert_eq!(d.get(2, 3), 2.0);
        assert_eq!(d.get(4, 5), 2.0);
        assert_eq!(d.get(0, 2), 1.0);
        assert_eq!(d.get(3, 3), 0.0);
    }

    #[test]
    fn disconnected_is_rejected() {
        let m = TriangleMesh::new(
            tetrahedron().positions().iter().chain(tetrahedron().positions()).copied().collect(),
            vec![[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2], [4, 5, 6], [4, 7, 5], [4, 6, 7], [5, 7, 6]],
        )
        .unwrap();
        assert!(matches!(
            surface_distance_matrix(&m, SurfaceMetric::EdgeLength),
            Err(Error::Disconnected { components: 2 })
        ));
    }

    #[test]
    fn uv_three_four_five() {
        let atlas = UvAtlas::new(vec![Point2::new(0.0, 0.0), Point2::new(0.3, 0.4), Point2::new(0.3, 0.4)]).unwrap();
        let d = uv_distance_matrix(&atlas).unwrap();
        assert!((d.get(0, 1) - 0.5).abs() < 1e-15);
        assert_eq!(d.get(1, 2), 0.0);
    }

    #[test]
    fn sampling_stride() {
        let m = grid(5);
        let d = surface_distance_matrix_sampled(&m, SurfaceMetric::HopCount, 4).unwrap();
        assert_eq!(d.vertices(), &[0, 4, 8, 12, 16, 20, 24]);
        assert!(surface_distance_matrix_sampled(&m, SurfaceMetric::HopCount, 0).is_err());
    }
}
