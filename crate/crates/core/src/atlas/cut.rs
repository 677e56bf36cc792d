use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::mesh::{Face, TriangleMesh};

/// Edge path along which a closed mesh is cut open.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SeamSpec {
    edges: Vec<(usize, usize)>,
}

impl SeamSpec {
    pub fn new(edges: Vec<(usize, usize)>) -> Self {
        Self { edges }
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Result of cutting: an open disk mesh and, per open vertex, the original
/// vertex it was split from.
#[derive(Debug, Clone)]
pub struct CutMesh {
    pub mesh: TriangleMesh,
    pub seam_map: Vec<usize>,
}

/// Splits vertices along the seam so the surface becomes a topological disk.
///
/// Corners around a vertex stay together when the faces share a non-seam
/// edge. The first wedge of every vertex keeps its index; extra wedges get new
/// indices after the original vertices, in vertex order. Symmetric pairs are
/// carried over when the mirror map is consistent with the cut.
pub fn cut_mesh(mesh: &TriangleMesh, seam: &SeamSpec) -> Result<CutMesh> {
    mesh.ensure_connected()?;
    let existing: HashSet<(usize, usize)> = mesh.edges().into_iter().collect();
    let mut seam_set = HashSet::new();
    for &(a, b) in seam.edges() {
        let key = (a.min(b), a.max(b));
        if !existing.contains(&key) {
            return Err(Error::invalid(format!("seam edge ({a}, {b}) is not a mesh edge")));
        }
        seam_set.insert(key);
    }

    let faces = mesh.faces();
    let n = mesh.vertex_count();
    // Face corners indexed as 3·face + k.
    let mut parent: Vec<usize> = (0..faces.len() * 3).collect();
    let mut edge_faces: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (fi, f) in faces.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            edge_faces.entry((a.min(b), a.max(b))).or_default().push(fi);
        }
    }
    let mut shared: Vec<_> = edge_faces.iter().filter(|(_, fs)| fs.len() == 2).collect();
    shared.sort_unstable_by_key(|(e, _)| **e);
    for (&(a, b), fs) in shared {
        if seam_set.contains(&(a, b)) {
            continue;
        }
        for v in [a, b] {
            let c0 = corner_of(faces, fs[0], v);
            let c1 = corner_of(faces, fs[1], v);
            union(&mut parent, c0, c1);
        }
    }

    // Assign open indices wedge by wedge.
    let mut wedges_of: Vec<Vec<usize>> = vec![Vec::new(); n];
    for c in 0..faces.len() * 3 {
        let root = find(&mut parent, c);
        let v = faces[c / 3][c % 3];
        if !wedges_of[v].contains(&root) {
            wedges_of[v].push(root);
        }
    }
    let mut open_index: HashMap<usize, usize> = HashMap::new();
    let mut seam_map: Vec<usize> = (0..n).collect();
    for (v, wedges) in wedges_of.iter().enumerate() {
        for (k, &root) in wedges.iter().enumerate() {
            let idx = if k == 0 {
                v
            } else {
                seam_map.push(v);
                seam_map.len() - 1
            };
            open_index.insert(root, idx);
        }
    }
    let open_faces: Vec<Face> = (0..faces.len())
        .map(|fi| {
            let mut f = [0; 3];
            for (k, slot) in f.iter_mut().enumerate() {
                let root = find(&mut parent, fi * 3 + k);
                *slot = open_index[&root];
            }
            f
        })
        .collect();
    let positions = seam_map.iter().map(|&v| mesh.positions()[v]).collect();
    let mut open = TriangleMesh::new(positions, open_faces)?;

    let euler = open.euler_characteristic();
    let loops = open.boundary_loops().map(|l| l.len()).unwrap_or(usize::MAX);
    let (_, components) = open.components();
    if euler != 1 || loops != 1 || components != 1 {
        return Err(Error::Topology {
            euler,
            boundary_loops: if loops == usize::MAX { 0 } else { loops },
        });
    }

    if let Some(pairs) = mesh.symmetric_pairs() {
        if let Some(open_pairs) = transfer_pairs(faces, open.faces(), pairs, seam_map.len()) {
            open = open.with_symmetric_pairs(open_pairs)?;
        }
    }
    Ok(CutMesh { mesh: open, seam_map })
}

fn corner_of(faces: &[Face], f: usize, v: usize) -> usize {
    let k = faces[f].iter().position(|&x| x == v).expect("vertex in face");
    f * 3 + k
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        parent[hi] = lo;
    }
}

/// Mirror map on the open mesh via the face-level mirror correspondence.
/// `None` when the mesh or the seam is not mirror-symmetric.
fn transfer_pairs(
    faces: &[Face],
    open_faces: &[Face],
    pairs: &[usize],
    open_count: usize,
) -> Option<Vec<usize>> {
    let key = |f: &Face| {
        let mut k = *f;
        k.sort_unstable();
        k
    };
    let by_key: HashMap<[usize; 3], usize> =
        faces.iter().enumerate().map(|(i, f)| (key(f), i)).collect();
    let mut out = vec![usize::MAX; open_count];
    for (fi, f) in faces.iter().enumerate() {
        let mirrored = key(&[pairs[f[0]], pairs[f[1]], pairs[f[2]]]);
        let g = *by_key.get(&mirrored)?;
        for k in 0..3 {
            let target = pairs[f[k]];
            let kg = faces[g].iter().position(|&x| x == target)?;
            let (o, o2) = (open_faces[fi][k], open_faces[g][kg]);
            if out[o] != usize::MAX && out[o] != o2 {
                return None;
            }
            out[o] = o2;
        }
    }
    for (i, &j) in out.iter().enumerate() {
        if j == usize::MAX || out[j] != i {
            return None;
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::fixtures::*;

    #[test]
    fn cube_cut_along_spanning_path() {
        let cube = cube();
        // Hamiltonian path through the 8 corners using cube edges.
        let path = [0, 1, 3, 2, 6, 7, 5, 4];
        let seam = SeamSpec::new(path.windows(2).map(|w| (w[0], w[1])).collect());
        let cut = cut_mesh(&cube, &seam).unwrap();
        assert_eq!(cut.mesh.face_count(), 12);
        assert_eq!(cut.mesh.boundary_loops().unwrap().len(), 1);
        // Interior path vertices are split in two, endpoints are not.
        assert_eq!(cut.mesh.vertex_count(), 8 + 6);
        assert_eq!(&cut.seam_map[..8], &[0, 1, 2, 3, 4, 5, 6, 7]);
    }

    #[test]
    fn empty_seam_on_closed_mesh_fails() {
        let e = cut_mesh(&cube(), &SeamSpec::default()).unwrap_err();
        assert!(matches!(e, Error::Topology { euler: 2, boundary_loops: 0 }));
    }

    #[test]
    fn open_disk_passes_through() {
        let g = grid(4);
        let cut = cut_mesh(&g, &SeamSpec::default()).unwrap();
        assert_eq!(cut.mesh, g);
        assert_eq!(cut.seam_map, (0..16).collect::<Vec<_>>());
    }

    #[test]
    fn unknown_seam_edge() {
        let e = cut_mesh(&cube(), &SeamSpec::new(vec![(0, 7)])).unwrap_err();
        assert!(matches!(e, Error::InvalidArgument(_)));
    }
}
