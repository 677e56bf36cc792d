//! Regenerates the bundled low-poly humanoid and its sidecar files.
//!
//!     cargo run -p uvkit --example make_humanoid [out_dir]
//!
//! The body is a union of axis-aligned voxel boxes (legs, torso, neck, head,
//! arms), surfaced, triangulated mirror-symmetrically and Taubin-smoothed.
//! Lattice coordinates are kept alongside the mesh so seams, seeds and joint
//! regions can be written down as lattice paths and predicates.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::PathBuf;

use nalgebra::{Point2, Point3, Rotation3, Vector3};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use uvkit::atlas::SeamSpec;
use uvkit::io;
use uvkit::measures::{save_regressor, JointRegressor};
use uvkit::{TriangleMesh, UvAtlas};

type Lattice = [i32; 3];

/// Meters per lattice unit; the body ends up about 1.8 m tall.
const VOXEL: f64 = 0.075;

fn occupied([i, j, k]: Lattice) -> bool {
    let leg = ((-3..-1).contains(&i) || (1..3).contains(&i)) && (0..10).contains(&j) && (-1..1).contains(&k);
    let torso = (-3..3).contains(&i) && (10..19).contains(&j) && (-2..2).contains(&k);
    let neck = (-1..1).contains(&i) && j == 19 && (-1..1).contains(&k);
    let head = (-2..2).contains(&i) && (20..24).contains(&j) && (-2..2).contains(&k);
    let arm = ((3..12).contains(&i) || (-12..-3).contains(&i)) && (16..18).contains(&j) && (-1..1).contains(&k);
    leg || torso || neck || head || arm
}

struct Surface {
    lattice: Vec<Lattice>,
    faces: Vec<[usize; 3]>,
    /// Outward axis (0..6: +x, −x, +y, −y, +z, −z) of the quad each face came from.
    normal: Vec<usize>,
}

fn unit(axis: usize) -> Lattice {
    let mut e = [0; 3];
    e[axis] = 1;
    e
}

fn add(a: Lattice, b: Lattice) -> Lattice {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn build_surface() -> Surface {
    let mut quads: Vec<([Lattice; 4], usize)> = Vec::new();
    for i in -12..12 {
        for j in 0..24 {
            for k in -2..2 {
                let v = [i, j, k];
                if !occupied(v) {
                    continue;
                }
                for axis in 0..3 {
                    let (b, c) = ((axis + 1) % 3, (axis + 2) % 3);
                    for positive in [true, false] {
                        let mut n = v;
                        n[axis] += if positive { 1 } else { -1 };
                        if occupied(n) {
                            continue;
                        }
                        let base = if positive { add(v, unit(axis)) } else { v };
                        let mut q = [
                            base,
                            add(base, unit(b)),
                            add(add(base, unit(b)), unit(c)),
                            add(base, unit(c)),
                        ];
                        if !positive {
                            q.reverse();
                        }
                        quads.push((q, 2 * axis + usize::from(!positive)));
                    }
                }
            }
        }
    }
    let points: BTreeSet<Lattice> = quads.iter().flat_map(|(q, _)| q.iter().copied()).collect();
    let lattice: Vec<Lattice> = points.into_iter().collect();
    let index: HashMap<Lattice, usize> = lattice.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut faces = Vec::new();
    let mut normal = Vec::new();
    for (q, n) in quads {
        // Split along the diagonal through the corner with the smallest
        // mirror-invariant key, so mirrored quads split the same way.
        let key = |p: Lattice| (p[0].abs(), p[1], p[2]);
        let m = (0..4).min_by_key(|&c| key(q[c])).unwrap();
        let at = |o: usize| index[&q[(m + o) % 4]];
        faces.push([at(0), at(1), at(2)]);
        faces.push([at(0), at(2), at(3)]);
        normal.extend([n, n]);
    }
    Surface {
        lattice,
        faces,
        normal,
    }
}

fn mirror_pairs(lattice: &[Lattice]) -> Vec<usize> {
    let index: HashMap<Lattice, usize> = lattice.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    lattice.iter().map(|p| index[&[-p[0], p[1], p[2]]]).collect()
}

fn smooth(mesh: &TriangleMesh, pairs: &[usize], rounds: usize) -> Vec<Point3<f64>> {
    let nbrs = mesh.vertex_neighbors();
    let mut p = mesh.positions().to_vec();
    for _ in 0..rounds {
        for factor in [0.5, -0.53] {
            let next: Vec<Point3<f64>> = p
                .iter()
                .enumerate()
                .map(|(i, x)| {
                    let mean = nbrs[i].iter().map(|&j| p[j].coords).sum::<Vector3<f64>>() / nbrs[i].len() as f64;
                    x + (mean - x.coords) * factor
                })
                .collect();
            p = next;
        }
    }
    // Remove rounding asymmetry.
    (0..p.len())
        .map(|i| {
            let q = p[pairs[i]];
            Point3::new(0.5 * (p[i].x - q.x), 0.5 * (p[i].y + q.y), 0.5 * (p[i].z + q.z))
        })
        .collect()
}

/// Walks axis-aligned lattice segments between waypoints.
fn lattice_path(waypoints: &[Lattice]) -> Vec<(Lattice, Lattice)> {
    let mut out = Vec::new();
    for w in waypoints.windows(2) {
        let (mut a, b) = (w[0], w[1]);
        let axis = (0..3).find(|&k| a[k] != b[k]).expect("distinct waypoints");
        assert!((0..3).all(|k| k == axis || a[k] == b[k]), "waypoints {a:?} {b:?} not axis aligned");
        let step = (b[axis] - a[axis]).signum();
        while a != b {
            let mut n = a;
            n[axis] += step;
            out.push((a, n));
            a = n;
        }
    }
    out
}

fn seam_edges(surface: &Surface, mesh: &TriangleMesh) -> Vec<(usize, usize)> {
    let spine = [[0, 24, 0], [0, 24, -2], [0, 20, -2], [0, 20, -1], [0, 19, -1], [0, 19, -2], [0, 10, -2]];
    let leg = |s: i32| vec![[0, 10, -2], [0, 10, -1], [2 * s, 10, -1], [2 * s, 0, -1], [2 * s, 0, 0]];
    let arm = |s: i32| vec![[0, 17, -2], [3 * s, 17, -2], [3 * s, 17, -1], [12 * s, 17, -1], [12 * s, 17, 0]];
    let mut segs = lattice_path(&spine);
    for s in [-1, 1] {
        segs.extend(lattice_path(&leg(s)));
        segs.extend(lattice_path(&arm(s)));
    }
    let index: HashMap<Lattice, usize> = surface.lattice.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mesh_edges: BTreeSet<(usize, usize)> = mesh.edges().into_iter().collect();
    let edges: BTreeSet<(usize, usize)> = segs
        .iter()
        .map(|(a, b)| {
            let (i, j) = (index[a], index[b]);
            let e = (i.min(j), i.max(j));
            assert!(mesh_edges.contains(&e), "seam step {a:?} -> {b:?} is not a mesh edge");
            e
        })
        .collect();
    let verts: BTreeSet<usize> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    assert_eq!(edges.len() + 1, verts.len(), "seam must be a tree");
    edges.into_iter().collect()
}

fn select(lattice: &[Lattice], pred: impl Fn(Lattice) -> bool) -> Vec<usize> {
    lattice.iter().enumerate().filter(|(_, &p)| pred(p)).map(|(i, _)| i).collect()
}

/// Fourteen joints, each the mean of a lattice region.
fn regressor(lattice: &[Lattice]) -> JointRegressor {
    let arm = |p: Lattice| (16..=18).contains(&p[1]) && (-1..=1).contains(&p[2]);
    let leg = |p: Lattice| (-1..=1).contains(&p[2]);
    let mut regions: Vec<Vec<usize>> = vec![
        select(lattice, |p| p[1] == 22),
        select(lattice, |p| p[1] == 19 && p[0].abs() <= 1 && p[2].abs() <= 1),
    ];
    for s in [-1, 1] {
        regions.push(select(lattice, |p| p[0] == 3 * s && arm(p)));
        regions.push(select(lattice, |p| p[0] == 7 * s && arm(p)));
        regions.push(select(lattice, |p| p[0] == 11 * s && arm(p)));
        regions.push(select(lattice, |p| p[1] == 9 && p[0] * s >= 1 && p[0] * s <= 3 && leg(p)));
        regions.push(select(lattice, |p| p[1] == 5 && p[0] * s >= 1 && p[0] * s <= 3 && leg(p)));
        regions.push(select(lattice, |p| p[1] == 1 && p[0] * s >= 1 && p[0] * s <= 3 && leg(p)));
    }
    let triplets: Vec<(usize, usize, f64)> = regions
        .iter()
        .enumerate()
        .flat_map(|(r, vs)| {
            assert!(!vs.is_empty(), "joint {r} has an empty region");
            let w = 1.0 / vs.len() as f64;
            vs.iter().map(move |&v| (r, v, w))
        })
        .collect();
    JointRegressor::from_triplets(regions.len(), lattice.len(), &triplets).unwrap()
}

/// Multi-chart atlas: each planar patch of same-normal faces of one body
/// region becomes its own chart, projected flat and dropped into a shuffled
/// tile of a grid.
fn fragmented_atlas(surface: &Surface) -> (TriangleMesh, UvAtlas, usize) {
    let region = |p: Lattice| -> usize {
        match p[1] {
            _ if p[0].abs() > 3 => 1 + usize::from(p[0] > 0),
            y if y < 10 => 3 + usize::from(p[0] > 0),
            y if y >= 20 => 5,
            _ => 0,
        }
    };
    // Group faces by (normal, region of the face centroid), then split into
    // edge-connected components.
    let fcount = surface.faces.len();
    let mut parent: Vec<usize> = (0..fcount).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let group: Vec<(usize, usize)> = surface
        .faces
        .iter()
        .zip(&surface.normal)
        .map(|(f, &n)| {
            let c = f.iter().fold([0; 3], |acc, &v| add(acc, surface.lattice[v]));
            // Corner sum is three times the centroid.
            let cell = [c[0].div_euclid(3), c[1].div_euclid(3), c[2].div_euclid(3)];
            (n, region(cell))
        })
        .collect();
    let mut edge_owner: HashMap<(usize, usize), usize> = HashMap::new();
    for (fi, f) in surface.faces.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            let e = (a.min(b), a.max(b));
            if let Some(&other) = edge_owner.get(&e) {
                if group[other] == group[fi] {
                    let (ra, rb) = (find(&mut parent, other), find(&mut parent, fi));
                    parent[ra.max(rb)] = ra.min(rb);
                }
            } else {
                edge_owner.insert(e, fi);
            }
        }
    }
    let mut charts: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for f in 0..fcount {
        let root = find(&mut parent, f);
        charts.entry(root).or_default().push(f);
    }
    let charts: Vec<Vec<usize>> = charts.into_values().collect();

    let cols = (charts.len() as f64).sqrt().ceil() as usize;
    let mut tiles: Vec<usize> = (0..cols * cols).collect();
    tiles.shuffle(&mut ChaCha8Rng::seed_from_u64(7));

    let flat = |f: usize, p: Lattice| -> [f64; 2] {
        let axis = surface.normal[f] / 2;
        let (b, c) = ((axis + 1) % 3, (axis + 2) % 3);
        if surface.normal[f].is_multiple_of(2) {
            [p[b] as f64, p[c] as f64]
        } else {
            [p[c] as f64, p[b] as f64]
        }
    };
    let extent = charts
        .iter()
        .map(|faces| {
            let pts: Vec<[f64; 2]> = faces
                .iter()
                .flat_map(|&f| surface.faces[f].iter().map(move |&v| (f, v)))
                .map(|(f, v)| flat(f, surface.lattice[v]))
                .collect();
            let span = |k: usize| {
                let lo = pts.iter().map(|p| p[k]).fold(f64::MAX, f64::min);
                let hi = pts.iter().map(|p| p[k]).fold(f64::MIN, f64::max);
                hi - lo
            };
            span(0).max(span(1))
        })
        .fold(0.0, f64::max);
    let cell = 1.0 / cols as f64;
    let scale = 0.9 * cell / extent;

    let mut coords = Vec::new();
    let mut seam_map = Vec::new();
    let mut faces = Vec::new();
    for (ci, chart) in charts.iter().enumerate() {
        let tile = tiles[ci];
        let origin = [(tile % cols) as f64 * cell, (tile / cols) as f64 * cell];
        let pts: Vec<[f64; 2]> = chart
            .iter()
            .flat_map(|&f| surface.faces[f].iter().map(move |&v| (f, v)))
            .map(|(f, v)| flat(f, surface.lattice[v]))
            .collect();
        let lo = [
            pts.iter().map(|p| p[0]).fold(f64::MAX, f64::min),
            pts.iter().map(|p| p[1]).fold(f64::MAX, f64::min),
        ];
        let mut local: BTreeMap<usize, usize> = BTreeMap::new();
        for &f in chart {
            let tri = surface.faces[f].map(|v| {
                *local.entry(v).or_insert_with(|| {
                    let q = flat(f, surface.lattice[v]);
                    coords.push(Point2::new(
                        origin[0] + 0.05 * cell + (q[0] - lo[0]) * scale,
                        origin[1] + 0.05 * cell + (q[1] - lo[1]) * scale,
                    ));
                    seam_map.push(v);
                    coords.len() - 1
                })
            });
            faces.push(tri);
        }
    }
    (
        TriangleMesh::new(vec![Point3::origin(); coords.len()], faces).unwrap(),
        UvAtlas::with_seam_map(coords, seam_map).unwrap(),
        charts.len(),
    )
}

/// Rotates each arm about its shoulder by `angle` (radians, positive lowers
/// the arms), blending in over the first two lattice units of the arm.
fn lower_arms(p: &[Point3<f64>], angle: f64) -> Vec<Point3<f64>> {
    p.iter()
        .map(|x| {
            let side = x.x.signum();
            let t = ((x.x.abs() / VOXEL - 3.0) / 2.0).clamp(0.0, 1.0);
            if t == 0.0 {
                return *x;
            }
            let pivot = Point3::new(side * 3.0 * VOXEL, 17.0 * VOXEL, 0.0);
            let r = Rotation3::from_axis_angle(&Vector3::z_axis(), -side * angle * t);
            pivot + r * (x - pivot)
        })
        .collect()
}

fn main() {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("assets"));
    std::fs::create_dir_all(&out).unwrap();

    let surface = build_surface();
    let pairs = mirror_pairs(&surface.lattice);
    let lattice_pos: Vec<Point3<f64>> = surface
        .lattice
        .iter()
        .map(|p| Point3::new(p[0] as f64, p[1] as f64, p[2] as f64))
        .collect();
    let lattice_mesh = TriangleMesh::new(lattice_pos, surface.faces.clone()).unwrap();
    lattice_mesh.ensure_consistent_orientation().unwrap();
    assert!(lattice_mesh.is_closed());
    assert_eq!(lattice_mesh.euler_characteristic(), 2);

    let smoothed = smooth(&lattice_mesh, &pairs, 6);
    let positions: Vec<Point3<f64>> = smoothed.iter().map(|p| Point3::from(p.coords * VOXEL)).collect();
    let mesh = lattice_mesh
        .with_positions(positions.clone())
        .unwrap()
        .with_symmetric_pairs(pairs.clone())
        .unwrap();

    let seam = SeamSpec::new(seam_edges(&surface, &mesh));
    let seeds = select(&surface.lattice, |p| p[0] == 0 && (10..=19).contains(&p[1]) && p[2].abs() == 2);

    io::save_obj(out.join("humanoid.obj"), &mesh, None).unwrap();
    io::save_symmetry(out.join("humanoid.sym"), &pairs).unwrap();
    io::save_seam(out.join("humanoid.seam"), &seam).unwrap();
    io::save_vertex_list(out.join("humanoid.seeds"), &seeds).unwrap();
    save_regressor(out.join("humanoid.joints"), &regressor(&surface.lattice)).unwrap();

    let (frag_mesh, frag_atlas, chart_count) = fragmented_atlas(&surface);
    let frag_mesh = uvkit::atlas::lift_positions(&frag_mesh, &frag_atlas, &positions).unwrap();
    io::save_obj(out.join("humanoid_fragmented.obj"), &frag_mesh, Some(&frag_atlas)).unwrap();
    io::save_seam_map(out.join("humanoid_fragmented.seammap"), frag_atlas.seam_map()).unwrap();

    let pose_a = mesh.with_positions(lower_arms(&positions, 0.5)).unwrap();
    io::save_obj(out.join("humanoid_pose_a.obj"), &pose_a, None).unwrap();
    let turn = Rotation3::from_axis_angle(&Vector3::y_axis(), 0.35);
    let pose_b: Vec<Point3<f64>> = lower_arms(&positions, -0.3).iter().map(|p| turn * p).collect();
    io::save_obj(out.join("humanoid_pose_b.obj"), &mesh.with_positions(pose_b).unwrap(), None).unwrap();

    println!(
        "{} vertices, {} faces, {} seam edges, {} seeds, {} fragmented charts -> {}",
        mesh.vertex_count(),
        mesh.face_count(),
        seam.edges().len(),
        seeds.len(),
        chart_count,
        out.display()
    );
}
