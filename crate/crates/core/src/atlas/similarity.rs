use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};

fn check_same(a: &DistanceMatrix, b: &DistanceMatrix) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::shape(format!(
            "distance matrices of size {} and {}",
            a.n(),
            b.n()
        )));
    }
    if a.n() == 0 {
        return Err(Error::shape("empty distance matrices"));
    }
    Ok(())
}

/// 2D correlation coefficient over all n² entries.
pub fn similarity_s1(a: &DistanceMatrix, b: &DistanceMatrix) -> Result<f64> {
    check_same(a, b)?;
    let (av, bv) = (a.values(), b.values());
    let count = av.len() as f64;
    let mean_a = av.iter().sum::<f64>() / count;
    let mean_b = bv.iter().sum::<f64>() / count;
    let (mut cross, mut var_a, mut var_b) = (0.0, 0.0, 0.0);
    for (x, y) in av.iter().zip(bv) {
        let (dx, dy) = (x - mean_a, y - mean_b);
        cross += dx * dy;
        var_a += dx * dx;
        var_b += dy * dy;
    }
    if var_a <= 0.0 || var_b <= 0.0 {
        return Err(Error::Numerical(
            "correlation of a constant distance matrix is undefined".to_string(),
        ));
    }
    Ok((cross / (var_a * var_b).sqrt()).clamp(-1.0, 1.0))
}

/// Cosine similarity of the matrices viewed as flat vectors.
pub fn similarity_s2(a: &DistanceMatrix, b: &DistanceMatrix) -> Result<f64> {
    check_same(a, b)?;
    let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
    for (x, y) in a.values().iter().zip(b.values()) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na <= 0.0 || nb <= 0.0 {
        return Err(Error::Numerical(
            "cosine similarity with an all-zero distance matrix".to_string(),
        ));
    }
    Ok((dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0))
}
