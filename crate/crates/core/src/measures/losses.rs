//! Training losses, evaluated (no gradients).
//!
//! Dense losses default to per-element means so their values do not depend
//! on resolution. [`Reduction::Sum`] gives the plain sums instead.

use nalgebra::Point2;

use super::{Joints2, Joints3};
use crate::codec::{Camera, GridTensor, IuvImage, LocationMap, DEFAULT_THRESHOLD};
use crate::error::{Error, Result};

const BCE_CLAMP: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reduction {
    #[default]
    Mean,
    Sum,
}

impl Reduction {
    fn apply(self, sum: f64, count: f64) -> f64 {
        match self {
            Reduction::Mean if count > 0.0 => sum / count,
            Reduction::Mean => 0.0,
            Reduction::Sum => sum,
        }
    }
}

/// Coefficients of the foreground BCE term, the UV regression term and the
/// consistency term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossWeights {
    pub fore: f64,
    pub uv: f64,
    pub consistency: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self {
            fore: 0.2,
            uv: 1.0,
            consistency: 1.0,
        }
    }
}

impl LossWeights {
    pub fn new(fore: f64, uv: f64, consistency: f64) -> Result<Self> {
        let w = Self {
            fore,
            uv,
            consistency,
        };
        w.validate()?;
        Ok(w)
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("fore", self.fore), ("uv", self.uv), ("consistency", self.consistency)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(format!("loss weight {name} = {v} must be nonnegative")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IuvLoss {
    pub total: f64,
    pub fore_bce: f64,
    pub uv_l1: f64,
}

/// Weighted foreground BCE over all pixels plus UV L1 over ground-truth
/// foreground pixels.
pub fn loss_iuv(pred: &IuvImage, gt: &IuvImage, weights: &LossWeights, reduction: Reduction) -> Result<IuvLoss> {
    weights.validate()?;
    if pred.height() != gt.height() || pred.width() != gt.width() {
        return Err(Error::shape(format!(
            "predicted IUV is {}x{}, ground truth {}x{}",
            pred.height(),
            pred.width(),
            gt.height(),
            gt.width()
        )));
    }
    let mut bce = 0.0;
    let mut l1 = 0.0;
    let mut fg = 0usize;
    for i in 0..gt.fore().len() {
        let p = pred.fore()[i].clamp(BCE_CLAMP, 1.0 - BCE_CLAMP);
        let y = gt.fore()[i];
        bce -= y * p.ln() + (1.0 - y) * (1.0 - p).ln();
        if y >= DEFAULT_THRESHOLD {
            let d: Point2<f64> = Point2::from(pred.uv()[i] - gt.uv()[i]);
            l1 += d.x.abs() + d.y.abs();
            fg += 1;
        }
    }
    let fore_bce = reduction.apply(bce, gt.fore().len() as f64);
    let uv_l1 = reduction.apply(l1, fg as f64);
    Ok(IuvLoss {
        total: weights.fore * fore_bce + weights.uv * uv_l1,
        fore_bce,
        uv_l1,
    })
}

/// Weighted L1 between location maps over texels valid in `gt`, normalized
/// by the total weight there (mean mode).
pub fn loss_map(pred: &LocationMap, gt: &LocationMap, weight: &GridTensor, reduction: Reduction) -> Result<f64> {
    let (h, w) = (gt.height(), gt.width());
    if pred.height() != h || pred.width() != w || weight.height() != h || weight.width() != w {
        return Err(Error::shape(format!(
            "location maps {}x{} / {h}x{w}, weight map {}x{}",
            pred.height(),
            pred.width(),
            weight.height(),
            weight.width()
        )));
    }
    if weight.channels() != 1 {
        return Err(Error::shape(format!("weight map has {} channels", weight.channels())));
    }
    if let Some(i) = weight.data().iter().position(|&x| x < 0.0) {
        return Err(Error::invalid(format!("weight map texel {i} is negative")));
    }
    let mut sum = 0.0;
    let mut wsum = 0.0;
    for i in 0..h * w {
        if !gt.mask()[i] {
            continue;
        }
        let wt = weight.data()[i];
        let d = pred.values()[i] - gt.values()[i];
        sum += wt * (d.x.abs() + d.y.abs() + d.z.abs());
        wsum += wt;
    }
    if wsum == 0.0 {
        return Err(Error::invalid("weight map is zero on every valid texel"));
    }
    Ok(match reduction {
        Reduction::Mean => sum / wsum,
        Reduction::Sum => sum,
    })
}

/// Per-joint L1 between 3D joint sets.
pub fn loss_joints_3d(pred: &Joints3, gt: &Joints3, reduction: Reduction) -> Result<f64> {
    pred.check_same_len(gt)?;
    let sum: f64 = pred
        .points()
        .iter()
        .zip(gt.points())
        .map(|(p, g)| (p - g).abs().sum())
        .sum();
    Ok(reduction.apply(sum, pred.len() as f64))
}

/// Per-joint squared 2D error; joints invisible in `gt` contribute 0 but
/// still count toward the mean.
pub fn loss_joints_2d(pred: &Joints2, gt: &Joints2, reduction: Reduction) -> Result<f64> {
    pred.check_same_len(gt)?;
    let sum: f64 = pred
        .points()
        .iter()
        .zip(gt.points())
        .zip(gt.visible())
        .filter(|(_, &v)| v)
        .map(|((p, g), _)| (p - g).norm_squared())
        .sum();
    Ok(reduction.apply(sum, pred.len() as f64))
}

/// Squared pixel distance between each foreground pixel center and the
/// projection of the location-map point its UV addresses.
pub fn loss_consistent(map: &LocationMap, gt_iuv: &IuvImage, camera: &Camera, reduction: Reduction) -> Result<f64> {
    let w = gt_iuv.width();
    let mut sum = 0.0;
    let mut n = 0usize;
    for i in gt_iuv.foreground(DEFAULT_THRESHOLD) {
        let uv = gt_iuv.uv()[i];
        let x = map
            .sample(uv.x, uv.y)
            .ok_or_else(|| Error::invalid("location map has no valid texels"))?;
        let pixel = Point2::new((i % w) as f64 + 0.5, (i / w) as f64 + 0.5);
        sum += (pixel - camera.project(&x)).norm_squared();
        n += 1;
    }
    if n == 0 {
        return Err(Error::invalid("IUV image has no foreground pixels"));
    }
    Ok(reduction.apply(sum, n as f64))
}

/// Already-evaluated loss terms; `iuv` is the weighted IUV total.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LossComponents {
    pub iuv: f64,
    pub map: f64,
    pub joints_3d: f64,
    pub joints_2d: f64,
    pub consistency: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBreakdown {
    pub components: LossComponents,
    pub weights: LossWeights,
    /// Location-branch sum: map + 3D joints + 2D joints.
    pub location: f64,
    pub weighted_consistency: f64,
    pub total: f64,
}

/// `L = L_iuv + (L_map + L_j3d + L_j2d) + λ_con · L_con`.
pub fn loss_total(components: &LossComponents, weights: &LossWeights) -> Result<LossBreakdown> {
    weights.validate()?;
    let location = components.map + components.joints_3d + components.joints_2d;
    let weighted_consistency = weights.consistency * components.consistency;
    Ok(LossBreakdown {
        components: *components,
        weights: *weights,
        location,
        weighted_consistency,
        total: components.iuv + location + weighted_consistency,
    })
}
