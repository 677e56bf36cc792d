use nalgebra::{Matrix3, Point3, Rotation3, Vector3};

use crate::error::{Error, Result};

/// `p ↦ s·R·p + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Similarity {
    pub scale: f64,
    pub rotation: Rotation3<f64>,
    pub translation: Vector3<f64>,
}

impl Similarity {
    pub fn identity() -> Self {
        Self {
            scale: 1.0,
            rotation: Rotation3::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn apply(&self, p: &Point3<f64>) -> Point3<f64> {
        Point3::from(self.rotation * p.coords * self.scale + self.translation)
    }
}

fn centered(points: &[Point3<f64>]) -> (Vector3<f64>, Vec<Vector3<f64>>) {
    let mean = points.iter().map(|p| p.coords).sum::<Vector3<f64>>() / points.len() as f64;
    (mean, points.iter().map(|p| p.coords - mean).collect())
}

/// Rejects point sets whose spread is (numerically) a line or a point.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn check_spread(which: &str, pts: &[Vector3<f64>]) -> Result<()> {
    let scatter: Matrix3<f64> = pts.iter().map(|p| p * p.transpose()).sum();
    let sv = scatter.singular_values();
    let (s1, s2) = {
        let mut v = [sv[0], sv[1], sv[2]];
        v.sort_by(|a, b| b.total_cmp(a));
        (v[0], v[1])
    };
    if !(s1 > 0.0) || s2 <= 1e-12 * s1 {
        return Err(Error::Numerical(format!("{which} points are collinear or coincident")));
    }
    Ok(())
}

/// Least-squares similarity transform taking `pred` onto `gt`
/// (cross-covariance SVD with a reflection guard; scale from the trace ratio).
pub fn procrustes_align(pred: &[Point3<f64>], gt: &[Point3<f64>]) -> Result<(Vec<Point3<f64>>, Similarity)> {
    if pred.len() != gt.len() {
        return Err(Error::shape(format!("{} vs {} points", pred.len(), gt.len())));
    }
    if pred.len() < 3 {
        return Err(Error::invalid(format!("Procrustes needs at least 3 points, got {}", pred.len())));
    }
    let (mp, p) = centered(pred);
    let (mg, g) = centered(gt);
    check_spread("predicted", &p)?;
    check_spread("ground-truth", &g)?;
    let cov: Matrix3<f64> = g.iter().zip(&p).map(|(g, p)| g * p.transpose()).sum();
    let svd = cov.svd(true, true);
    let (u, v_t) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
    // Reflection guard: flip the direction of the smallest singular value.
    let sv = svd.singular_values;
    let smallest = (0..3).min_by(|&a, &b| sv[a].total_cmp(&sv[b])).expect("three values");
    let mut signs = Vector3::new(1.0, 1.0, 1.0);
    signs[smallest] = (u * v_t).determinant().signum();
    let rotation = Rotation3::from_matrix_unchecked(u * Matrix3::from_diagonal(&signs) * v_t);
    let var_p: f64 = p.iter().map(|x| x.norm_squared()).sum();
    let trace = sv.dot(&signs);
    let scale = trace / var_p;
    let translation = mg - rotation * mp * scale;
    let t = Similarity {
        scale,
        rotation,
        translation,
    };
    Ok((pred.iter().map(|q| t.apply(q)).collect(), t))
}
