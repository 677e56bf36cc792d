use crate::error::{Error, Result};

/// Symmetric positive-definite matrix in row-list form, solved by
/// Jacobi-preconditioned conjugate gradients.
pub(crate) struct SparseSpd {
    pub(crate) rows: Vec<Vec<(usize, f64)>>,
}

impl SparseSpd {
    fn mul(&self, x: &[f64], out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(&self.rows) {
            *o = row.iter().map(|&(j, a)| a * x[j]).sum();
        }
    }

    pub(crate) fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = b.len();
        let mut x = vec![0.0; n];
        if n == 0 {
            return Ok(x);
        }
        // The diagonal is stored first in every row.
        let diag: Vec<f64> = self.rows.iter().map(|r| r[0].1).collect();
        let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
        let mut r = b.to_vec();
        let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
        let mut p = z.clone();
        let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let mut ap = vec![0.0; n];
        for _ in 0..(10 * n + 100) {
            let r_norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            if r_norm <= 1e-14 * b_norm {
                return Ok(x);
            }
            self.mul(&p, &mut ap);
            let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
            if pap <= 0.0 || !pap.is_finite() {
                return Err(Error::Numerical("linear system is not positive definite".to_string()));
            }
            let alpha = rz / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            for i in 0..n {
                z[i] = r[i] / diag[i];
            }
            let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        let r_norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r_norm <= 1e-10 * b_norm {
            Ok(x)
        } else {
            Err(Error::Numerical(format!(
                "conjugate gradients did not converge (relative residual {:.3e})",
                r_norm / b_norm
            )))
        }
    }
}
