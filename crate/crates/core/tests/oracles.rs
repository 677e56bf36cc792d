//! Library results against the independent reference implementations.

mod support;

use std::collections::HashMap;

use nalgebra::{DMatrix, Point2, Point3, Rotation3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::fixtures::{self, humanoid, humanoid_camera};
use support::oracles;
use uvkit::atlas::{cut_mesh, fit_symmetry_axis, mirror_residual, similarity_s1, similarity_s2, symmetrize_atlas, tutte_embed, Boundary, SeamSpec};
use uvkit::codec::{raster, render_iuv, transfer_to_uv};
use uvkit::distance::{surface_distance_matrix, uv_distance_matrix};
use uvkit::measures::*;
use uvkit::{GridTensor, IuvImage, LocationMap, SurfaceMetric, TriangleMesh, UvAtlas};

#[test]
fn octahedron_hop_count_matches_floyd_warshall() {
    let m = fixtures::octahedron();
    let d = surface_distance_matrix(&m, SurfaceMetric::HopCount).unwrap();
    assert_eq!(d.values(), &oracles::floyd_warshall(&m, SurfaceMetric::HopCount)[..]);
}

#[test]
fn random_meshes_match_floyd_warshall_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let (r, c) = (rng.gen_range(2..=7), rng.gen_range(2..=7));
        let m = fixtures::random_grid_mesh(&mut rng, r, c);
        for metric in [SurfaceMetric::EdgeLength, SurfaceMetric::HopCount] {
            let d = surface_distance_matrix(&m, metric).unwrap();
            assert_eq!(d.values(), &oracles::floyd_warshall(&m, metric)[..], "{r}x{c} {metric:?}");
        }
    }
}

#[test]
fn uv_distances_match_double_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let coords: Vec<Point2<f64>> = (0..5).map(|_| Point2::new(rng.gen(), rng.gen())).collect();
    let d = uv_distance_matrix(&UvAtlas::new(coords.clone()).unwrap()).unwrap();
    for i in 0..5 {
        for j in 0..5 {
            let want = ((coords[i].x - coords[j].x).powi(2) + (coords[i].y - coords[j].y).powi(2)).sqrt();
            assert!((d.get(i, j) - want).abs() < 1e-15);
        }
    }
}

#[test]
fn cut_cube_has_one_boundary_loop() {
    let cube = fixtures::cube();
    // Hamiltonian path along cube edges.
    let path = [0, 1, 3, 2, 6, 7, 5, 4];
    let seam = SeamSpec::new(path.windows(2).map(|w| (w[0], w[1])).collect());
    assert_eq!(seam.edges().len(), 7);
    let cut = cut_mesh(&cube, &seam).unwrap();
    assert_eq!(cut.mesh.face_count(), 12);
    assert_eq!(oracles::boundary_loop_count(&cut.mesh), 1);
    assert_eq!(cut.mesh.euler_characteristic(), 1);
}

#[test]
fn grid_tutte_matches_dense_solve() {
    let m = fixtures::flat_grid(5, 5);
    let ours = tutte_embed(&m, Boundary::Circle).unwrap();
    let fixed: HashMap<usize, Point2<f64>> = m
        .boundary_loops()
        .unwrap()
        .concat()
        .into_iter()
        .map(|v| (v, ours.coords()[v]))
        .collect();
    assert_eq!(fixed.len(), 16);
    let want = oracles::dense_tutte(&m, &fixed);
    for (a, b) in ours.coords().iter().zip(&want) {
        assert!((a - b).norm() < 1e-8, "{a} vs {b}");
    }
}

fn symmetric_atlas(rng: &mut ChaCha8Rng, half: usize) -> (Vec<Point2<f64>>, Vec<usize>) {
    // `half` left points, their mirrors, and two on-axis points.
    let mut coords = Vec::new();
    for _ in 0..half {
        coords.push(Point2::new(rng.gen_range(0.1..0.45), rng.gen_range(0.1..0.9)));
    }
    for i in 0..half {
        coords.push(Point2::new(1.0 - coords[i].x, coords[i].y));
    }
    coords.push(Point2::new(0.5, 0.2));
    coords.push(Point2::new(0.5, 0.8));
    let mut pairs: Vec<usize> = (0..half).map(|i| i + half).chain(0..half).collect();
    pairs.extend([2 * half, 2 * half + 1]);
    (coords, pairs)
}

#[test]
fn perturbed_symmetric_atlas_against_brute_force_axis() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let sigma = 0.01;
    for _ in 0..20 {
        let (clean, pairs) = symmetric_atlas(&mut rng, 12);
        let noisy: Vec<Point2<f64>> = clean
            .iter()
            .map(|p| {
                let g = |rng: &mut ChaCha8Rng| {
                    // Box–Muller.
                    let (a, b): (f64, f64) = (rng.gen_range(1e-12..1.0), rng.gen());
                    (-2.0 * a.ln()).sqrt() * (2.0 * std::f64::consts::PI * b).cos()
                };
                Point2::new(p.x + sigma * g(&mut rng), p.y + sigma * g(&mut rng))
            })
            .collect();
        let fitted = fit_symmetry_axis(&noisy, &pairs).unwrap();
        let brute = oracles::brute_force_axis(&noisy, &pairs);
        let diff = (fitted.angle - brute).rem_euclid(std::f64::consts::PI);
        assert!(diff.min(std::f64::consts::PI - diff) < 1e-6, "{} vs {brute}", fitted.angle);

        let n = noisy.len();
        let faces = (1..n - 1).map(|i| [0, i, i + 1]).collect();
        let positions = (0..n).map(|i| Point3::new(i as f64, (i * i) as f64, 0.0)).collect();
        let mesh = TriangleMesh::new(positions, faces).unwrap().with_symmetric_pairs(pairs.clone()).unwrap();
        let out = symmetrize_atlas(&UvAtlas::new(noisy).unwrap(), &mesh).unwrap();
        assert!(mirror_residual(out.coords(), &pairs) <= 1e-6);
        let rms = (out.coords().iter().zip(&clean).map(|(a, b)| (a - b).norm_squared()).sum::<f64>() / n as f64).sqrt();
        assert!(rms <= 3.0 * sigma, "rms {rms}");
    }
}

#[test]
fn humanoid_foreground_matches_scanline_oracle() {
    let h = humanoid();
    let cont = fixtures::continuous();
    let cam = humanoid_camera();
    let img = render_iuv(&cont.open_mesh, &cont.atlas, &cam, 256, 256).unwrap();
    let pos = cont.open_mesh.positions();
    let tris: Vec<[Point2<f64>; 3]> = cont.open_mesh.faces().iter().map(|f| f.map(|i| cam.project(&pos[i]))).collect();
    let want = oracles::foreground_count(&tris, 256, 256);
    assert!(want > 1000, "humanoid should fill a good part of the frame");
    assert_eq!(img.foreground(0.5).count(), want);
    assert_eq!(h.mesh.vertex_count(), cont.atlas.original_vertex_count());
}

#[test]
fn oracle_coverage_agrees_with_rasterizer_cover() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..2000 {
        // Snap to quarter pixels so samples land on edges often.
        let q = |rng: &mut ChaCha8Rng| (rng.gen_range(0..32) as f64) / 4.0;
        let t = [Point2::new(q(&mut rng), q(&mut rng)), Point2::new(q(&mut rng), q(&mut rng)), Point2::new(q(&mut rng), q(&mut rng))];
        let p = Point2::new(rng.gen_range(0..8) as f64 + 0.5, rng.gen_range(0..8) as f64 + 0.5);
        assert_eq!(raster::cover(&t, &p).is_some(), oracles::covered(t, p), "{t:?} {p}");
    }
}

#[test]
fn humanoid_rgb_transfer_matches_scatter_loop() {
    let cont = fixtures::continuous();
    let img = render_iuv(&cont.open_mesh, &cont.atlas, &humanoid_camera(), 256, 256).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let rgb: Vec<f64> = (0..256 * 256 * 3).map(|_| rng.gen_range(0..256) as f64 / 255.0).collect();
    let image = GridTensor::from_data(256, 256, 3, rgb.clone()).unwrap();
    let out = transfer_to_uv(&image, &img, 64, 64, 0.5).unwrap();
    let (sums, counts) = oracles::scatter(&rgb, 3, img.fore(), img.uv(), 0.5, 64, 64);
    assert_eq!(out.counts, counts);
    for t in 0..64 * 64 {
        for k in 0..3 {
            let want = if counts[t] > 0 { sums[t * 3 + k] / counts[t] as f64 } else { 0.0 };
            assert_eq!(out.values.data()[t * 3 + k], want);
        }
    }
    let scattered: f64 = (0..256 * 256).filter(|&i| img.fore()[i] >= 0.5).map(|i| rgb[i * 3]).sum();
    let back: f64 = (0..64 * 64).map(|t| out.values.data()[t * 3] * out.counts[t] as f64).sum();
    assert!(oracles::close(back, scattered, 1e-6));
}

fn random_points3(rng: &mut ChaCha8Rng, n: usize) -> Vec<Point3<f64>> {
    (0..n).map(|_| Point3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

#[test]
fn sparse_regressor_matches_dense_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (k, n) = (6, 20);
    let mut dense = DMatrix::zeros(k, n);
    let mut triplets = Vec::new();
    for r in 0..k {
        let cols: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.3)).chain([r]).collect();
        let w: Vec<f64> = cols.iter().map(|_| rng.gen_range(0.1..1.0)).collect();
        let total: f64 = w.iter().sum();
        for (&c, &x) in cols.iter().zip(&w) {
            dense[(r, c)] += x / total;
            triplets.push((r, c, x / total));
        }
    }
    let reg = JointRegressor::from_triplets(k, n, &triplets).unwrap();
    let verts = random_points3(&mut rng, n);
    let got = regress_joints(&verts, &reg).unwrap();
    for (a, b) in got.points().iter().zip(oracles::dense_regress(&dense, &verts)) {
        assert!((a - b).norm() < 1e-9);
    }
}

#[test]
fn procrustes_matches_quaternion_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let pred = random_points3(&mut rng, 14);
        let gt = random_points3(&mut rng, 14);
        let (aligned, sim) = procrustes_align(&pred, &gt).unwrap();
        let (s, r, t) = oracles::horn_similarity(&pred, &gt);
        assert!((sim.scale - s).abs() < 1e-9);
        assert!((sim.rotation.matrix() - r.matrix()).abs().max() < 1e-9);
        assert!((sim.translation - t).abs().max() < 1e-9);
        for (a, p) in aligned.iter().zip(&pred) {
            assert!((a - Point3::from(r * p.coords * s + t)).norm() < 1e-9);
        }
    }
}

#[test]
fn surface_error_matches_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let a = random_points3(&mut rng, 30);
    let b = random_points3(&mut rng, 30);
    assert!(oracles::close(surface_error(&a, &b).unwrap(), oracles::mean_distance_mm(&a, &b), 1e-12));
    let rot = Rotation3::from_euler_angles(0.1, 0.2, 0.3);
    let moved: Vec<_> = b.iter().map(|p| Point3::from(rot * p.coords)).collect();
    assert!(oracles::close(surface_error(&moved, &b).unwrap(), oracles::mean_distance_mm(&moved, &b), 1e-12));
}

#[test]
fn segmentation_matches_confusion_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..20 {
        let p: Vec<f64> = (0..256).map(|_| rng.gen_range(0..2) as f64).collect();
        let g: Vec<f64> = (0..256).map(|_| rng.gen_range(0..2) as f64).collect();
        let s = segmentation_metrics(
            &GridTensor::from_data(16, 16, 1, p.clone()).unwrap(),
            &GridTensor::from_data(16, 16, 1, g.clone()).unwrap(),
        )
        .unwrap();
        assert_eq!((s.accuracy, s.f1), oracles::confusion_scores(&p, &g));
    }
}

#[test]
fn random_iuv_and_map_losses_match_loops() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 64;
    let pf: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
    let gf: Vec<f64> = (0..n).map(|_| rng.gen_range(0..2) as f64).collect();
    let puv: Vec<Point2<f64>> = (0..n).map(|_| Point2::new(rng.gen(), rng.gen())).collect();
    let guv: Vec<Point2<f64>> = (0..n).map(|_| Point2::new(rng.gen(), rng.gen())).collect();
    let pred = IuvImage::new(8, 8, pf.clone(), puv.clone()).unwrap();
    let gt = IuvImage::new(8, 8, gf.clone(), guv.clone()).unwrap();
    let l = loss_iuv(&pred, &gt, &LossWeights::default(), Reduction::Mean).unwrap();
    let (bce, l1) = oracles::iuv_terms(&pf, &puv, &gf, &guv);
    assert!(oracles::close(l.fore_bce, bce, 1e-9));
    assert!(oracles::close(l.uv_l1, l1, 1e-9));
    assert!(oracles::close(l.total, 0.2 * bce + l1, 1e-9));

    let pv = random_points3(&mut rng, n);
    let gv = random_points3(&mut rng, n);
    let mask: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.7)).collect();
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..3.0)).collect();
    let got = loss_map(
        &LocationMap::new(8, 8, pv.clone(), vec![true; n]).unwrap(),
        &LocationMap::new(8, 8, gv.clone(), mask.clone()).unwrap(),
        &GridTensor::from_data(8, 8, 1, w.clone()).unwrap(),
        Reduction::Mean,
    )
    .unwrap();
    assert!(oracles::close(got, oracles::map_loss(&pv, &gv, &mask, &w), 1e-9));
}

#[test]
fn random_joint_losses_match_loops() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let p3 = random_points3(&mut rng, 14);
    let g3 = random_points3(&mut rng, 14);
    let got = loss_joints_3d(&Joints3::new(p3.clone()).unwrap(), &Joints3::new(g3.clone()).unwrap(), Reduction::Mean).unwrap();
    assert!(oracles::close(got, oracles::joints_3d_loss(&p3, &g3), 1e-9));

    let p2: Vec<Point2<f64>> = (0..14).map(|_| Point2::new(rng.gen_range(0.0..256.0), rng.gen_range(0.0..256.0))).collect();
    let g2: Vec<Point2<f64>> = (0..14).map(|_| Point2::new(rng.gen_range(0.0..256.0), rng.gen_range(0.0..256.0))).collect();
    let vis: Vec<bool> = (0..14).map(|_| rng.gen_bool(0.8)).collect();
    let got = loss_joints_2d(
        &Joints2::new(p2.clone()).unwrap(),
        &Joints2::with_visibility(g2.clone(), vis.clone()).unwrap(),
        Reduction::Mean,
    )
    .unwrap();
    assert!(oracles::close(got, oracles::joints_2d_loss(&p2, &g2, &vis), 1e-9));
}

#[test]
fn similarity_matches_sum_formulas() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let m = fixtures::random_grid_mesh(&mut rng, 4, 5);
    let a = surface_distance_matrix(&m, SurfaceMetric::EdgeLength).unwrap();
    let coords: Vec<Point2<f64>> = (0..m.vertex_count()).map(|_| Point2::new(rng.gen(), rng.gen())).collect();
    let b = uv_distance_matrix(&UvAtlas::new(coords).unwrap()).unwrap();
    assert!(oracles::close(similarity_s1(&a, &b).unwrap(), oracles::pearson(a.values(), b.values()), 1e-9));
    assert!(oracles::close(similarity_s2(&a, &b).unwrap(), oracles::cosine(a.values(), b.values()), 1e-9));
}
