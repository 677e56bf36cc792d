use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{Point3, Vector3};

use super::Joints3;
use crate::error::{Error, Result};

/// Sparse row-stochastic `k`×`n` matrix mapping vertices to joints, stored
/// row-compressed.
#[derive(Debug, Clone, PartialEq)]
pub struct JointRegressor {
    joints: usize,
    vertices: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    weights: Vec<f64>,
}

impl JointRegressor {
    /// Builds from `(row, col, weight)` triplets; duplicates are summed.
    pub fn from_triplets(joints: usize, vertices: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut t = triplets.to_vec();
        for &(r, c, w) in &t {
            if r >= joints || c >= vertices {
                return Err(Error::invalid(format!(
                    "entry ({r}, {c}) outside a {joints}x{vertices} regressor"
                )));
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::invalid(format!("entry ({r}, {c}) has weight {w}")));
            }
        }
        t.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_start = vec![0; joints + 1];
        let mut cols = Vec::with_capacity(t.len());
        let mut weights: Vec<f64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, w) in t {
            if last == Some((r, c)) {
                *weights.last_mut().expect("previous entry") += w;
                continue;
            }
            last = Some((r, c));
            cols.push(c);
            weights.push(w);
            row_start[r + 1] = cols.len();
        }
        for r in 0..joints {
            row_start[r + 1] = row_start[r + 1].max(row_start[r]);
        }
        let reg = Self {
            joints,
            vertices,
            row_start,
            cols,
            weights,
        };
        for r in 0..joints {
            let sum: f64 = reg.row(r).map(|(_, w)| w).sum();
            if (sum - 1.0).abs() > 1e-6 {
                return Err(Error::invalid(format!("regressor row {r} sums to {sum}, not 1")));
            }
        }
        Ok(reg)
    }

    pub fn joint_count(&self) -> usize {
        self.joints
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    /// Nonzeros of row `r` as `(col, weight)`, in column order.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_start[r]..self.row_start[r + 1];
        self.cols[span.clone()].iter().copied().zip(self.weights[span].iter().copied())
    }
}

/// `Z = J·V`.
pub fn regress_joints(vertices: &[Point3<f64>], regressor: &JointRegressor) -> Result<Joints3> {
    if vertices.len() != regressor.vertex_count() {
        return Err(Error::shape(format!(
            "regressor expects {} vertices, got {}",
            regressor.vertex_count(),
            vertices.len()
        )));
    }
    let points = (0..regressor.joint_count())
        .map(|r| Point3::from(regressor.row(r).map(|(c, w)| vertices[c].coords * w).sum::<Vector3<f64>>()))
        .collect();
    Joints3::new(points)
}

/// Reads a `k n nnz` header followed by `row col value` lines (0-based).
pub fn load_regressor(path: impl AsRef<Path>) -> Result<JointRegressor> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "missing `k n nnz` header".into()))?;
    let h: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| parse_err(hl, format!("bad header: {e}")))?;
    let [k, n, nnz] = h[..] else {
        return Err(parse_err(hl, "header must be `k n nnz`".into()));
    };
    let mut triplets = Vec::with_capacity(nnz);
    for (ln, line) in lines {
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() != 3 {
            return Err(parse_err(ln, "expected `row col value`".into()));
        }
        let r: usize = t[0].parse().map_err(|e| parse_err(ln, format!("bad row: {e}")))?;
        let c: usize = t[1].parse().map_err(|e| parse_err(ln, format!("bad column: {e}")))?;
        let w: f64 = t[2].parse().map_err(|e| parse_err(ln, format!("bad value: {e}")))?;
        triplets.push((r, c, w));
    }
    if triplets.len() != nnz {
        return Err(parse_err(hl, format!("header declares {nnz} entries, found {}", triplets.len())));
    }
    JointRegressor::from_triplets(k, n, &triplets).map_err(|e| match e {
        Error::InvalidArgument(msg) => parse_err(hl, msg),
        other => other,
    })
}

pub fn save_regressor(path: impl AsRef<Path>, regressor: &JointRegressor) -> Result<()> {
    let path = path.as_ref();
    let mut s = format!("{} {} {}\n", regressor.joint_count(), regressor.vertex_count(), regressor.nnz());
    for r in 0..regressor.joint_count() {
        for (c, w) in regressor.row(r) {
            let _ = writeln!(s, "{r} {c} {w:?}");
        }
    }
    std::fs::write(path, s).map_err(|e| Error::io(path, e))
}
