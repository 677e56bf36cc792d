//! Straightforward reference implementations. None of these call into the
//! library beyond reading its data types.

use std::collections::{HashMap, HashSet};

use nalgebra::{DMatrix, DVector, Matrix3, Matrix4, Point2, Point3, Rotation3, SymmetricEigen, UnitQuaternion, Vector3};
use uvkit::{SurfaceMetric, TriangleMesh};

fn undirected_edges(mesh: &TriangleMesh) -> Vec<(usize, usize)> {
    let mut set = HashSet::new();
    for f in mesh.faces() {
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            set.insert((a.min(b), a.max(b)));
        }
    }
    let mut v: Vec<_> = set.into_iter().collect();
    v.sort_unstable();
    v
}

/// All-pairs shortest paths by Floyd–Warshall.
///
/// Path lengths are re-summed edge by edge from one endpoint so the rounding
/// matches any single-source search that extends paths one edge at a time;
/// the smaller of the two endpoint sums is kept.
pub fn floyd_warshall(mesh: &TriangleMesh, metric: SurfaceMetric) -> Vec<f64> {
    let n = mesh.vertex_count();
    let pos = mesh.positions();
    let mut d = vec![f64::INFINITY; n * n];
    let mut next = vec![usize::MAX; n * n];
    let mut weight = HashMap::new();
    for i in 0..n {
        d[i * n + i] = 0.0;
        next[i * n + i] = i;
    }
    for (a, b) in undirected_edges(mesh) {
        let w = match metric {
            SurfaceMetric::EdgeLength => (pos[a] - pos[b]).norm(),
            SurfaceMetric::HopCount => 1.0,
        };
        weight.insert((a, b), w);
        d[a * n + b] = w;
        d[b * n + a] = w;
        next[a * n + b] = b;
        next[b * n + a] = a;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i * n + k] + d[k * n + j];
                if via < d[i * n + j] {
                    d[i * n + j] = via;
                    next[i * n + j] = next[i * n + k];
                }
            }
        }
    }
    let w = |a: usize, b: usize| weight[&(a.min(b), a.max(b))];
    let fold = |path: &[usize]| path.windows(2).fold(0.0, |acc, e| acc + w(e[0], e[1]));
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut path = vec![i];
            let mut at = i;
            while at != j {
                at = next[at * n + j];
                path.push(at);
            }
            let forward = fold(&path);
            path.reverse();
            out[i * n + j] = forward.min(fold(&path));
        }
    }
    out
}

/// Interior positions of a uniform Tutte embedding from a dense solve, given
/// fixed boundary positions.
pub fn dense_tutte(mesh: &TriangleMesh, fixed: &HashMap<usize, Point2<f64>>) -> Vec<Point2<f64>> {
    let n = mesh.vertex_count();
    let mut nbrs = vec![HashSet::new(); n];
    for (a, b) in undirected_edges(mesh) {
        nbrs[a].insert(b);
        nbrs[b].insert(a);
    }
    let interior: Vec<usize> = (0..n).filter(|v| !fixed.contains_key(v)).collect();
    let slot: HashMap<usize, usize> = interior.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let m = interior.len();
    let mut l = DMatrix::<f64>::zeros(m, m);
    let mut bx = DVector::<f64>::zeros(m);
    let mut by = DVector::<f64>::zeros(m);
    for (k, &v) in interior.iter().enumerate() {
        l[(k, k)] = nbrs[v].len() as f64;
        for &w in &nbrs[v] {
            match slot.get(&w) {
                Some(&j) => l[(k, j)] -= 1.0,
                None => {
                    bx[k] += fixed[&w].x;
                    by[k] += fixed[&w].y;
                }
            }
        }
    }
    let lu = l.lu();
    let x = lu.solve(&bx).unwrap();
    let y = lu.solve(&by).unwrap();
    (0..n)
        .map(|v| match slot.get(&v) {
            Some(&k) => Point2::new(x[k], y[k]),
            None => fixed[&v],
        })
        .collect()
}

/// Number of boundary loops found by walking boundary half-edges.
pub fn boundary_loop_count(mesh: &TriangleMesh) -> usize {
    let mut directed = HashSet::new();
    for f in mesh.faces() {
        for k in 0..3 {
            directed.insert((f[k], f[(k + 1) % 3]));
        }
    }
    // A boundary half-edge has no twin; follow them tail to head.
    let mut next: HashMap<usize, usize> = HashMap::new();
    for &(a, b) in &directed {
        if !directed.contains(&(b, a)) {
            assert!(next.insert(a, b).is_none(), "boundary vertex {a} is pinched");
        }
    }
    let mut seen = HashSet::new();
    let mut loops = 0;
    for &start in next.keys() {
        if seen.contains(&start) {
            continue;
        }
        loops += 1;
        let mut at = start;
        while seen.insert(at) {
            at = next[&at];
        }
    }
    loops
}

/// Reflection residual Σ‖Ref(p_i) − p_pair(i)‖² about the line with direction
/// `angle` through the centroid.
pub fn reflection_residual(coords: &[Point2<f64>], pairs: &[usize], angle: f64) -> f64 {
    let n = coords.len() as f64;
    let cx = coords.iter().map(|p| p.x).sum::<f64>() / n;
    let cy = coords.iter().map(|p| p.y).sum::<f64>() / n;
    let (c2, s2) = ((2.0 * angle).cos(), (2.0 * angle).sin());
    let mut sum = 0.0;
    for (i, p) in coords.iter().enumerate() {
        let (x, y) = (p.x - cx, p.y - cy);
        let rx = c2 * x + s2 * y;
        let ry = s2 * x - c2 * y;
        let q = coords[pairs[i]];
        sum += (rx - (q.x - cx)).powi(2) + (ry - (q.y - cy)).powi(2);
    }
    sum
}

/// Best reflection-line angle in [0, π) by a coarse scan and golden-section
/// refinement.
pub fn brute_force_axis(coords: &[Point2<f64>], pairs: &[usize]) -> f64 {
    let f = |a: f64| reflection_residual(coords, pairs, a);
    let steps = 3600;
    let h = std::f64::consts::PI / steps as f64;
    let best = (0..steps).min_by(|&a, &b| f(a as f64 * h).total_cmp(&f(b as f64 * h))).unwrap();
    let (mut lo, mut hi) = ((best as f64 - 1.0) * h, (best as f64 + 1.0) * h);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        if f(m1) < f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    (lo + hi) / 2.0
}

fn orient(a: Point2<f64>, b: Point2<f64>, p: Point2<f64>) -> f64 {
    (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x)
}

/// Pixel-center coverage with top-left ownership, tested against every face
/// for every pixel.
pub fn covered(tri: [Point2<f64>; 3], p: Point2<f64>) -> bool {
    let [a, mut b, mut c] = tri;
    let area = orient(a, b, c);
    if area == 0.0 {
        return false;
    }
    if area < 0.0 {
        std::mem::swap(&mut b, &mut c);
    }
    [(a, b), (b, c), (c, a)].iter().all(|&(s, e)| {
        let w = orient(s, e, p);
        // Edges going up, or horizontal edges going right, own their samples.
        w > 0.0 || (w == 0.0 && (e.y < s.y || (e.y == s.y && e.x > s.x)))
    })
}

pub fn foreground_count(tris: &[[Point2<f64>; 3]], height: usize, width: usize) -> usize {
    let mut count = 0;
    for r in 0..height {
        for c in 0..width {
            let p = Point2::new(c as f64 + 0.5, r as f64 + 0.5);
            if tris.iter().any(|t| covered(*t, p)) {
                count += 1;
            }
        }
    }
    count
}

/// Scatter of foreground pixel features into UV texels: (sums, counts).
pub fn scatter(
    features: &[f64],
    channels: usize,
    fore: &[f64],
    uv: &[Point2<f64>],
    threshold: f64,
    height: usize,
    width: usize,
) -> (Vec<f64>, Vec<u32>) {
    let mut sums = vec![0.0; height * width * channels];
    let mut counts = vec![0u32; height * width];
    for i in 0..fore.len() {
        if fore[i] < threshold {
            continue;
        }
        let c = ((uv[i].x * width as f64) as isize).clamp(0, width as isize - 1) as usize;
        let r = ((uv[i].y * height as f64) as isize).clamp(0, height as isize - 1) as usize;
        let t = r * width + c;
        for k in 0..channels {
            sums[t * channels + k] += features[i * channels + k];
        }
        counts[t] += 1;
    }
    (sums, counts)
}

/// Similarity by Horn's quaternion method: (scale, rotation, translation)
/// minimizing Σ‖s·R·p + t − g‖².
pub fn horn_similarity(pred: &[Point3<f64>], gt: &[Point3<f64>]) -> (f64, Rotation3<f64>, Vector3<f64>) {
    let n = pred.len() as f64;
    let mp: Vector3<f64> = pred.iter().map(|p| p.coords).sum::<Vector3<f64>>() / n;
    let mg: Vector3<f64> = gt.iter().map(|p| p.coords).sum::<Vector3<f64>>() / n;
    let mut s = Matrix3::zeros();
    for (p, g) in pred.iter().zip(gt) {
        s += (p.coords - mp) * (g.coords - mg).transpose();
    }
    let (sxx, sxy, sxz) = (s[(0, 0)], s[(0, 1)], s[(0, 2)]);
    let (syx, syy, syz) = (s[(1, 0)], s[(1, 1)], s[(1, 2)]);
    let (szx, szy, szz) = (s[(2, 0)], s[(2, 1)], s[(2, 2)]);
    #[rustfmt::skip]
    let big = Matrix4::new(
        sxx + syy + szz, syz - szy,        szx - sxz,        sxy - syx,
        syz - szy,       sxx - syy - szz,  sxy + syx,        szx + sxz,
        szx - sxz,       sxy + syx,        -sxx + syy - szz, syz + szy,
        sxy - syx,       szx + sxz,        syz + szy,        -sxx - syy + szz,
    );
    let eig = SymmetricEigen::new(big);
    let k = eig.eigenvalues.imax();
    let q = eig.eigenvectors.column(k);
    let rot = UnitQuaternion::from_quaternion(nalgebra::Quaternion::new(q[0], q[1], q[2], q[3])).to_rotation_matrix();
    let mut num = 0.0;
    let mut den = 0.0;
    for (p, g) in pred.iter().zip(gt) {
        let rp = rot * (p.coords - mp);
        num += rp.dot(&(g.coords - mg));
        den += (p.coords - mp).norm_squared();
    }
    let scale = num / den;
    (scale, rot, mg - rot * mp * scale)
}

pub fn mean_distance_mm(a: &[Point3<f64>], b: &[Point3<f64>]) -> f64 {
    let mut sum = 0.0;
    for i in 0..a.len() {
        let dx = a[i].x - b[i].x;
        let dy = a[i].y - b[i].y;
        let dz = a[i].z - b[i].z;
        sum += (dx * dx + dy * dy + dz * dz).sqrt();
    }
    1000.0 * sum / a.len() as f64
}

/// Mean BCE over all pixels and mean L1 over gt-foreground pixels.
pub fn iuv_terms(pf: &[f64], puv: &[Point2<f64>], gf: &[f64], guv: &[Point2<f64>]) -> (f64, f64) {
    let mut bce = 0.0;
    let mut l1 = 0.0;
    let mut fg = 0.0;
    for i in 0..gf.len() {
        let p = pf[i].clamp(1e-7, 1.0 - 1e-7);
        bce += -(gf[i] * p.ln()) - (1.0 - gf[i]) * (1.0 - p).ln();
        if gf[i] >= 0.5 {
            l1 += (puv[i].x - guv[i].x).abs() + (puv[i].y - guv[i].y).abs();
            fg += 1.0;
        }
    }
    (bce / gf.len() as f64, if fg > 0.0 { l1 / fg } else { 0.0 })
}

pub fn map_loss(pred: &[Point3<f64>], gt: &[Point3<f64>], mask: &[bool], weight: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..gt.len() {
        if mask[i] {
            let e = (pred[i].x - gt[i].x).abs() + (pred[i].y - gt[i].y).abs() + (pred[i].z - gt[i].z).abs();
            num += weight[i] * e;
            den += weight[i];
        }
    }
    num / den
}

pub fn joints_3d_loss(pred: &[Point3<f64>], gt: &[Point3<f64>]) -> f64 {
    let mut sum = 0.0;
    for i in 0..pred.len() {
        sum += (pred[i].x - gt[i].x).abs() + (pred[i].y - gt[i].y).abs() + (pred[i].z - gt[i].z).abs();
    }
    sum / pred.len() as f64
}

pub fn joints_2d_loss(pred: &[Point2<f64>], gt: &[Point2<f64>], visible: &[bool]) -> f64 {
    let mut sum = 0.0;
    for i in 0..pred.len() {
        if visible[i] {
            sum += (pred[i].x - gt[i].x).powi(2) + (pred[i].y - gt[i].y).powi(2);
        }
    }
    sum / pred.len() as f64
}

/// Bilinear sample at (u, v) over valid texels, renormalized; nearest valid
/// texel when none of the four neighbors is valid.
pub fn bilinear(values: &[Point3<f64>], mask: &[bool], h: usize, w: usize, u: f64, v: f64) -> Point3<f64> {
    let x = u * w as f64 - 0.5;
    let y = v * h as f64 - 0.5;
    let (x0, y0) = (x.floor(), y.floor());
    let (fx, fy) = (x - x0, y - y0);
    let mut acc = Vector3::zeros();
    let mut wsum = 0.0;
    for (dy, wy) in [(0.0, 1.0 - fy), (1.0, fy)] {
        for (dx, wx) in [(0.0, 1.0 - fx), (1.0, fx)] {
            let (cf, rf) = (x0 + dx, y0 + dy);
            if cf < 0.0 || rf < 0.0 || cf >= w as f64 || rf >= h as f64 {
                continue;
            }
            let (c, r) = (cf as usize, rf as usize);
            let wt = wx * wy;
            if mask[r * w + c] && wt > 0.0 {
                acc += values[r * w + c].coords * wt;
                wsum += wt;
            }
        }
    }
    if wsum > 0.0 {
        return Point3::from(acc / wsum);
    }
    let mut best = (f64::INFINITY, Point3::origin());
    for r in 0..h {
        for c in 0..w {
            if mask[r * w + c] {
                let d = (c as f64 - x).powi(2) + (r as f64 - y).powi(2);
                if d < best.0 {
                    best = (d, values[r * w + c]);
                }
            }
        }
    }
    best.1
}

#[allow(clippy::too_many_arguments)]
pub fn consistency_loss(
    values: &[Point3<f64>],
    mask: &[bool],
    h: usize,
    w: usize,
    fore: &[f64],
    uv: &[Point2<f64>],
    width: usize,
    camera: [f64; 3],
) -> f64 {
    let [s, tx, ty] = camera;
    let mut sum = 0.0;
    let mut n = 0.0;
    for i in 0..fore.len() {
        if fore[i] >= 0.5 {
            let x = bilinear(values, mask, h, w, uv[i].x, uv[i].y);
            let px = (i % width) as f64 + 0.5;
            let py = (i / width) as f64 + 0.5;
            sum += (px - (s * x.x + tx)).powi(2) + (py - (s * x.y + ty)).powi(2);
            n += 1.0;
        }
    }
    sum / n
}

/// (accuracy, f1) from an explicit confusion matrix.
pub fn confusion_scores(pred: &[f64], gt: &[f64]) -> (f64, f64) {
    let mut m = [[0u64; 2]; 2];
    for (&p, &g) in pred.iter().zip(gt) {
        m[p as usize][g as usize] += 1;
    }
    let (tn, fnn, fp, tp) = (m[0][0], m[0][1], m[1][0], m[1][1]);
    let total = (tn + fnn + fp + tp) as f64;
    let f1 = if tp + fp + fnn == 0 { 1.0 } else { (2 * tp) as f64 / (2 * tp + fp + fnn) as f64 };
    ((tp + tn) as f64 / total, f1)
}

/// Pearson correlation over all entries, from raw sums.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (mut sa, mut sb, mut saa, mut sbb, mut sab) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..a.len() {
        sa += a[i];
        sb += b[i];
        saa += a[i] * a[i];
        sbb += b[i] * b[i];
        sab += a[i] * b[i];
    }
    (n * sab - sa * sb) / ((n * saa - sa * sa) * (n * sbb - sb * sb)).sqrt()
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

/// Dense J·V.
pub fn dense_regress(dense: &DMatrix<f64>, vertices: &[Point3<f64>]) -> Vec<Point3<f64>> {
    let v = DMatrix::from_fn(vertices.len(), 3, |i, k| vertices[i][k]);
    let z = dense * v;
    (0..z.nrows()).map(|r| Point3::new(z[(r, 0)], z[(r, 1)], z[(r, 2)])).collect()
}

/// |a − b| ≤ tol · max(1, |b|).
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

/// Multi-source shortest-path distances by repeated edge relaxation.
pub fn bellman_ford(mesh: &TriangleMesh, sources: &[usize]) -> Vec<f64> {
    let pos = mesh.positions();
    let edges = undirected_edges(mesh);
    let mut d = vec![f64::INFINITY; mesh.vertex_count()];
    for &s in sources {
        d[s] = 0.0;
    }
    loop {
        let mut changed = false;
        for &(a, b) in &edges {
            let w = (pos[a] - pos[b]).norm();
            if d[a] + w < d[b] {
                d[b] = d[a] + w;
                changed = true;
            }
            if d[b] + w < d[a] {
                d[a] = d[b] + w;
                changed = true;
            }
        }
        if !changed {
            return d;
        }
    }
}
