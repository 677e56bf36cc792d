use nalgebra::Point3;

use super::{procrustes_align, Joints3};
use crate::codec::{check_threshold, GridTensor, IuvImage};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Alignment {
    #[default]
    None,
    Procrustes,
}

fn mean_distance_mm(a: &[Point3<f64>], b: &[Point3<f64>]) -> f64 {
    let sum: f64 = a.iter().zip(b).map(|(p, q)| (p - q).norm()).sum();
    1000.0 * sum / a.len() as f64
}

/// Mean per-joint position error in millimeters (inputs in meters).
pub fn mpjpe(pred: &Joints3, gt: &Joints3, alignment: Alignment) -> Result<f64> {
    pred.check_same_len(gt)?;
    if pred.is_empty() {
        return Err(Error::invalid("no joints to compare"));
    }
    Ok(match alignment {
        Alignment::None => mean_distance_mm(pred.points(), gt.points()),
        Alignment::Procrustes => {
            let (aligned, _) = procrustes_align(pred.points(), gt.points())?;
            mean_distance_mm(&aligned, gt.points())
        }
    })
}

/// Mean per-vertex Euclidean error in millimeters.
pub fn surface_error(pred: &[Point3<f64>], gt: &[Point3<f64>]) -> Result<f64> {
    if pred.len() != gt.len() {
        return Err(Error::shape(format!("{} vs {} vertices", pred.len(), gt.len())));
    }
    if pred.is_empty() {
        return Err(Error::invalid("no vertices to compare"));
    }
    Ok(mean_distance_mm(pred, gt))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentationScores {
    pub accuracy: f64,
    pub f1: f64,
}

/// Foreground mask (`fore ≥ threshold`) as a one-channel 0/1 grid.
pub fn fore_mask(iuv: &IuvImage, threshold: f64) -> Result<GridTensor> {
    check_threshold(threshold)?;
    let data = iuv.fore().iter().map(|&f| if f >= threshold { 1.0 } else { 0.0 }).collect();
    GridTensor::from_data(iuv.height(), iuv.width(), 1, data)
}

fn binary(which: &str, m: &GridTensor) -> Result<()> {
    if m.channels() != 1 {
        return Err(Error::shape(format!("{which} mask has {} channels", m.channels())));
    }
    if let Some(i) = m.data().iter().position(|&x| x != 0.0 && x != 1.0) {
        return Err(Error::invalid(format!("{which} mask value {} at {i} is not 0 or 1", m.data()[i])));
    }
    Ok(())
}

/// Pixel accuracy and foreground F1. With no foreground in either mask F1
/// is 1; with foreground only in the prediction it is 0.
pub fn segmentation_metrics(pred: &GridTensor, gt: &GridTensor) -> Result<SegmentationScores> {
    if pred.height() != gt.height() || pred.width() != gt.width() {
        return Err(Error::shape(format!(
            "masks are {}x{} and {}x{}",
            pred.height(),
            pred.width(),
            gt.height(),
            gt.width()
        )));
    }
    binary("predicted", pred)?;
    binary("ground-truth", gt)?;
    let (mut tp, mut tn, mut fp, mut fnn) = (0u64, 0u64, 0u64, 0u64);
    for (&p, &g) in pred.data().iter().zip(gt.data()) {
        match (p == 1.0, g == 1.0) {
            (true, true) => tp += 1,
            (false, false) => tn += 1,
            (true, false) => fp += 1,
            (false, true) => fnn += 1,
        }
    }
    let total = (tp + tn + fp + fnn) as f64;
    let accuracy = if total > 0.0 { (tp + tn) as f64 / total } else { 1.0 };
    let f1 = if tp + fp + fnn == 0 {
        1.0
    } else {
        2.0 * tp as f64 / (2 * tp + fp + fnn) as f64
    };
    Ok(SegmentationScores { accuracy, f1 })
}
