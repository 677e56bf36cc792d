//! Indexed triangle meshes with validation and basic connectivity queries.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{Point3, Vector3};

use crate::error::{Error, Result};

pub type Face = [usize; 3];

/// An indexed triangle surface.
///
/// Construction validates indices, degenerate faces, edge-manifoldness and the
/// symmetric-pair involution; a `TriangleMesh` is immutable afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    positions: Vec<Point3<f64>>,
    faces: Vec<Face>,
    symmetric_pairs: Option<Vec<usize>>,
}

impl TriangleMesh {
    pub fn new(positions: Vec<Point3<f64>>, faces: Vec<Face>) -> Result<Self> {
        validate_faces(positions.len(), &faces)?;
        Ok(Self {
            positions,
            faces,
            symmetric_pairs: None,
        })
    }

    /// Attaches a bilateral mirror map: `pairs[i]` is the mirror of vertex `i`.
    pub fn with_symmetric_pairs(mut self, pairs: Vec<usize>) -> Result<Self> {
        if pairs.len() != self.positions.len() {
            return Err(Error::shape(format!(
                "{} symmetric pairs for {} vertices",
                pairs.len(),
                self.positions.len()
            )));
        }
        for (i, &j) in pairs.iter().enumerate() {
            if j >= pairs.len() || pairs[j] != i {
                return Err(Error::BadSymmetry { vertex: i });
            }
        }
        self.symmetric_pairs = Some(pairs);
        Ok(self)
    }

    /// Same connectivity, new vertex positions.
    pub fn with_positions(&self, positions: Vec<Point3<f64>>) -> Result<Self> {
        if positions.len() != self.positions.len() {
            return Err(Error::shape(format!(
                "{} positions for a mesh with {} vertices",
                positions.len(),
                self.positions.len()
            )));
        }
        Ok(Self {
            positions,
            faces: self.faces.clone(),
            symmetric_pairs: self.symmetric_pairs.clone(),
        })
    }

    pub fn positions(&self) -> &[Point3<f64>] {
        &self.positions
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn symmetric_pairs(&self) -> Option<&[usize]> {
        self.symmetric_pairs.as_deref()
    }

    pub fn vertex_count(&self) -> usize {
        self.positions.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Unique undirected edges as `(min, max)` pairs, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<(usize, usize)> = self
            .faces
            .iter()
            .flat_map(face_edges)
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    /// Sorted neighbor lists of the vertex-edge graph.
    pub fn vertex_neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for (a, b) in self.edges() {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Directed boundary half-edges `(a, b)`: face edges whose reverse is not
    /// used by any face.
    pub fn boundary_half_edges(&self) -> Vec<(usize, usize)> {
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for f in &self.faces {
            for (a, b) in face_edges(f) {
                *count.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        let mut out: Vec<(usize, usize)> = self
            .faces
            .iter()
            .flat_map(face_edges)
            .filter(|&(a, b)| count[&(a.min(b), a.max(b))] == 1)
            .collect();
        out.sort_unstable();
        out
    }

    pub fn is_closed(&self) -> bool {
        self.boundary_half_edges().is_empty()
    }

    /// Boundary loops traced along face orientation. Each loop starts at its
    /// smallest vertex index; loops are ordered by that start vertex.
    pub fn boundary_loops(&self) -> Result<Vec<Vec<usize>>> {
        let half_edges = self.boundary_half_edges();
        let mut next: BTreeMap<usize, usize> = BTreeMap::new();
        for &(a, b) in &half_edges {
            if next.insert(a, b).is_some() {
                return Err(Error::invalid(format!(
                    "vertex {a} has more than one outgoing boundary edge (pinched boundary)"
                )));
            }
        }
        let mut visited: BTreeMap<usize, bool> = next.keys().map(|&k| (k, false)).collect();
        let mut loops = Vec::new();
        let starts: Vec<usize> = next.keys().copied().collect();
        for start in starts {
            if visited[&start] {
                continue;
            }
            let mut cycle = vec![start];
            visited.insert(start, true);
            let mut cur = next[&start];
            while cur != start {
                match next.get(&cur) {
                    Some(&n) => {
                        cycle.push(cur);
                        visited.insert(cur, true);
                        cur = n;
                    }
                    None => {
                        return Err(Error::invalid(format!(
                            "boundary walk stalled at vertex {cur}"
                        )))
                    }
                }
                if cycle.len() > half_edges.len() {
                    return Err(Error::invalid("boundary walk did not close".to_string()));
                }
            }
            loops.push(cycle);
        }
        Ok(loops)
    }

    /// Connected-component label per vertex and the number of components.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let n = self.vertex_count();
        let adj = self.vertex_neighbors();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            stack.push(s);
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
                    if label[w] == usize::MAX {
                        label[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn ensure_connected(&self) -> Result<()> {
        let (_, components) = self.components();
        if components != 1 {
            return Err(Error::Disconnected { components });
        }
        Ok(())
    }

    /// V − E + F.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edges().len() as i64 + self.face_count() as i64
    }

    /// Fails if some edge is traversed twice in the same direction.
    pub fn ensure_consistent_orientation(&self) -> Result<()> {
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        for f in &self.faces {
            for e in face_edges(f) {
                let c = seen.entry(e).or_default();
                *c += 1;
                if *c > 1 {
                    return Err(Error::InconsistentOrientation { a: e.0, b: e.1 });
                }
            }
        }
        Ok(())
    }

    pub fn face_area(&self, f: usize) -> f64 {
        let [a, b, c] = self.faces[f];
        let p = &self.positions;
        0.5 * (p[b] - p[a]).cross(&(p[c] - p[a])).norm()
    }

    pub fn bbox(&self) -> (Point3<f64>, Point3<f64>) {
        let mut lo = Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.positions {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        (lo, hi)
    }

    pub fn bbox_diagonal(&self) -> f64 {
        let (lo, hi) = self.bbox();
        (hi - lo).norm()
    }

    /// Uniformly scaled copy (about the origin).
    pub fn scaled(&self, factor: f64) -> Self {
        let positions = self.positions.iter().map(|p| p * factor).collect();
        Self {
            positions,
            faces: self.faces.clone(),
            symmetric_pairs: self.symmetric_pairs.clone(),
        }
    }

    pub fn translated(&self, offset: Vector3<f64>) -> Self {
        let positions = self.positions.iter().map(|p| p + offset).collect();
        Self {
            positions,
            faces: self.faces.clone(),
            symmetric_pairs: self.symmetric_pairs.clone(),
        }
    }
}

pub(crate) fn face_edges(f: &Face) -> [(usize, usize); 3] {
    [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])]
}

fn validate_faces(n: usize, faces: &[Face]) -> Result<()> {
    let mut edge_faces: HashMap<(usize, usize), usize> = HashMap::new();
    for (fi, f) in faces.iter().enumerate() {
        for &index in f {
            if index >= n {
                return Err(Error::IndexOutOfRange {
                    face: fi,
                    index,
                    count: n,
                });
            }
        }
        if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
            return Err(Error::DegenerateFace { face: fi });
        }
        for (a, b) in face_edges(f) {
            *edge_faces.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    let mut bad: Vec<_> = edge_faces.into_iter().filter(|&(_, c)| c > 2).collect();
    bad.sort_unstable();
    if let Some(&((a, b), faces)) = bad.first() {
        return Err(Error::NonManifoldEdge { a, b, faces });
    }
    Ok(())
}
