use std::path::PathBuf;
use std::sync::OnceLock;

use nalgebra::Point3;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use uvkit::atlas::{build_continuous_atlas, AtlasConfig, ContinuousAtlas, SeamSpec};
use uvkit::measures::{load_regressor, JointRegressor};
use uvkit::{io, Camera, TriangleMesh, UvAtlas};

/// Canonical camera for the bundled humanoid at 256×256.
pub const HUMANOID_CAMERA: [f64; 3] = [120.0, 128.0, 20.0];

pub fn humanoid_camera() -> Camera {
    let [s, tx, ty] = HUMANOID_CAMERA;
    Camera::new(s, tx, ty).unwrap()
}

pub fn assets_dir() -> PathBuf {
    let here = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let own = here.join("assets");
    if own.join("humanoid.obj").is_file() {
        own
    } else {
        here.join("../core/assets")
    }
}

pub struct Humanoid {
    /// Closed rest-pose mesh with symmetric pairs attached.
    pub mesh: TriangleMesh,
    pub seam: SeamSpec,
    pub seeds: Vec<usize>,
    pub regressor: JointRegressor,
    /// Many-chart comparison atlas: open mesh plus atlas with seam map.
    pub fragmented: (TriangleMesh, UvAtlas),
    pub pose_a: TriangleMesh,
    pub pose_b: TriangleMesh,
}

pub fn humanoid() -> &'static Humanoid {
    static CELL: OnceLock<Humanoid> = OnceLock::new();
    CELL.get_or_init(|| {
        let dir = assets_dir();
        let mesh = io::load_mesh(dir.join("humanoid.obj")).unwrap().mesh;
        let pairs = io::load_symmetry(dir.join("humanoid.sym"), mesh.vertex_count()).unwrap();
        Humanoid {
            mesh: mesh.with_symmetric_pairs(pairs).unwrap(),
            seam: io::load_seam(dir.join("humanoid.seam")).unwrap(),
            seeds: io::load_vertex_list(dir.join("humanoid.seeds")).unwrap(),
            regressor: load_regressor(dir.join("humanoid.joints")).unwrap(),
            fragmented: io::load_atlas(
                dir.join("humanoid_fragmented.obj"),
                Some(dir.join("humanoid_fragmented.seammap").as_path()),
            )
            .unwrap(),
            pose_a: io::load_mesh(dir.join("humanoid_pose_a.obj")).unwrap().mesh,
            pose_b: io::load_mesh(dir.join("humanoid_pose_b.obj")).unwrap().mesh,
        }
    })
}

/// The humanoid's continuous atlas with default settings, built once.
pub fn continuous() -> &'static ContinuousAtlas {
    static CELL: OnceLock<ContinuousAtlas> = OnceLock::new();
    CELL.get_or_init(|| {
        let h = humanoid();
        build_continuous_atlas(&h.mesh, &h.seam, &AtlasConfig::default()).unwrap()
    })
}

/// Connected open mesh: a jittered `rows`×`cols` grid with random diagonals
/// and random heights. Consistently oriented, at most `rows·cols` vertices.
pub fn random_grid_mesh(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> TriangleMesh {
    let mut positions = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            positions.push(Point3::new(
                c as f64 + rng.gen_range(-0.3..0.3),
                r as f64 + rng.gen_range(-0.3..0.3),
                rng.gen_range(-1.0..1.0),
            ));
        }
    }
    let mut faces = Vec::new();
    for r in 0..rows - 1 {
        for c in 0..cols - 1 {
            let a = r * cols + c;
            let (b, d, e) = (a + 1, a + cols, a + cols + 1);
            if rng.gen_bool(0.5) {
                faces.push([a, b, e]);
                faces.push([a, e, d]);
            } else {
                faces.push([a, b, d]);
                faces.push([b, e, d]);
            }
        }
    }
    TriangleMesh::new(positions, faces).unwrap()
}

/// Regular `rows`×`cols` grid in the z = 0 plane, unit spacing.
pub fn flat_grid(rows: usize, cols: usize) -> TriangleMesh {
    let positions = (0..rows * cols)
        .map(|i| Point3::new((i % cols) as f64, (i / cols) as f64, 0.0))
        .collect();
    let mut faces = Vec::new();
    for r in 0..rows - 1 {
        for c in 0..cols - 1 {
            let a = r * cols + c;
            faces.push([a, a + 1, a + cols + 1]);
            faces.push([a, a + cols + 1, a + cols]);
        }
    }
    TriangleMesh::new(positions, faces).unwrap()
}

/// Axis-aligned unit cube, outward-facing triangles.
pub fn cube() -> TriangleMesh {
    let positions = (0..8)
        .map(|i| Point3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64))
        .collect();
    let faces = vec![
        [0, 2, 3], [0, 3, 1], // z = 0
        [4, 5, 7], [4, 7, 6], // z = 1
        [0, 1, 5], [0, 5, 4], // y = 0
        [2, 6, 7], [2, 7, 3], // y = 1
        [0, 4, 6], [0, 6, 2], // x = 0
        [1, 3, 7], [1, 7, 5], // x = 1
    ];
    TriangleMesh::new(positions, faces).unwrap()
}

pub fn octahedron() -> TriangleMesh {
    let positions = vec![
        Point3::new(1.0, 0.0, 0.0),
        Point3::new(-1.0, 0.0, 0.0),
        Point3::new(0.0, 1.0, 0.0),
        Point3::new(0.0, -1.0, 0.0),
        Point3::new(0.0, 0.0, 1.0),
        Point3::new(0.0, 0.0, -1.0),
    ];
    let faces = vec![
        [0, 2, 4], [2, 1, 4], [1, 3, 4], [3, 0, 4],
        [2, 0, 5], [1, 2, 5], [3, 1, 5], [0, 3, 5],
    ];
    TriangleMesh::new(positions, faces).unwrap()
}
