//! Scanline triangle rasterization over a sample grid.
//!
//! Sample `(r, c)` sits at `(c + 0.5, r + 0.5)` in grid coordinates. Shared
//! edges are owned by exactly one triangle (top-left rule in y-down
//! coordinates), so adjacent triangles never both cover a sample. Rows are
//! processed in parallel; within a row faces are visited in index order, which
//! makes results independent of the thread count.

use nalgebra::Point2;
use rayon::prelude::*;

/// A covered sample: which face and its barycentric weights there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fragment {
    pub face: usize,
    pub bary: [f64; 3],
}

fn edge(a: &Point2<f64>, b: &Point2<f64>, p: &Point2<f64>) -> f64 {
    (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x)
}

fn owns_edge(a: &Point2<f64>, b: &Point2<f64>) -> bool {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    dy < 0.0 || (dy == 0.0 && dx > 0.0)
}

/// Barycentric weights of `p` in the triangle, or `None` when the sample is
/// outside (or on an edge the triangle does not own). Zero-area triangles
/// cover nothing.
pub fn cover(tri: &[Point2<f64>; 3], p: &Point2<f64>) -> Option<[f64; 3]> {
    let area = edge(&tri[0], &tri[1], &tri[2]);
    if area == 0.0 || !area.is_finite() {
        return None;
    }
    // Work with a positively oriented copy; remember the permutation.
    let (t, order) = if area > 0.0 {
        (*tri, [0usize, 1, 2])
    } else {
        ([tri[0], tri[2], tri[1]], [0usize, 2, 1])
    };
    let area = area.abs();
    let w0 = edge(&t[1], &t[2], p);
    let w1 = edge(&t[2], &t[0], p);
    let w2 = edge(&t[0], &t[1], p);
    let inside = |w: f64, a: &Point2<f64>, b: &Point2<f64>| w > 0.0 || (w == 0.0 && owns_edge(a, b));
    if inside(w0, &t[1], &t[2]) && inside(w1, &t[2], &t[0]) && inside(w2, &t[0], &t[1]) {
        let mut bary = [0.0; 3];
        bary[order[0]] = w0 / area;
        bary[order[1]] = w1 / area;
        bary[order[2]] = w2 / area;
        Some(bary)
    } else {
        None
    }
}

/// Rasterizes `tris` onto a `width`×`height` grid. `visit` is called for
/// each covered sample with the cell, the face index and barycentrics; faces
/// reach a given cell in increasing index order.
pub fn rasterize<T, F>(tris: &[[Point2<f64>; 3]], width: usize, height: usize, cells: &mut [T], visit: F)
where
    T: Send,
    F: Fn(&mut T, Fragment) + Sync,
{
    assert_eq!(cells.len(), width * height);
    if width == 0 || height == 0 {
        return;
    }
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); height];
    for (fi, t) in tris.iter().enumerate() {
        let ymin = t.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
        let ymax = t.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
        if !(ymin.is_finite() && ymax.is_finite()) {
            continue;
        }
        let r0 = (ymin - 0.5).ceil().max(0.0);
        let r1 = (ymax - 0.5).floor().min(height as f64 - 1.0);
        if r0 > r1 {
            continue;
        }
        for row in &mut rows[r0 as usize..=r1 as usize] {
            row.push(fi);
        }
    }
    cells
        .par_chunks_mut(width)
        .zip(rows.par_iter())
        .enumerate()
        .for_each(|(r, (row, faces))| {
            let y = r as f64 + 0.5;
            for &fi in faces {
                let t = &tris[fi];
                let xmin = t.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
                let xmax = t.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
                let c0 = (xmin - 0.5).ceil().max(0.0);
                let c1 = (xmax - 0.5).floor().min(width as f64 - 1.0);
                if c0 > c1 {
                    continue;
                }
                let c0 = c0 as usize;
                for (c, cell) in row[c0..=c1 as usize].iter_mut().enumerate() {
                    let p = Point2::new((c0 + c) as f64 + 0.5, y);
                    if let Some(bary) = cover(t, &p) {
                        visit(cell, Fragment { face: fi, bary });
                    }
                }
            }
        });
}
