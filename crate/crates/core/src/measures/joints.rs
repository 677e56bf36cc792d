use nalgebra::Point;

use crate::codec::Camera;
use crate::error::{Error, Result};

/// `k` joints in `D` dimensions with per-joint visibility.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSet<const D: usize> {
    points: Vec<Point<f64, D>>,
    visible: Vec<bool>,
}

pub type Joints3 = JointSet<3>;
pub type Joints2 = JointSet<2>;

impl<const D: usize> JointSet<D> {
    /// All joints visible.
    pub fn new(points: Vec<Point<f64, D>>) -> Result<Self> {
        let visible = vec![true; points.len()];
        Self::with_visibility(points, visible)
    }

    pub fn with_visibility(points: Vec<Point<f64, D>>, visible: Vec<bool>) -> Result<Self> {
        if points.len() != visible.len() {
            return Err(Error::shape(format!(
                "{} joints, {} visibility flags",
                points.len(),
                visible.len()
            )));
        }
        for (i, (p, &v)) in points.iter().zip(&visible).enumerate() {
            if v && p.iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid(format!("visible joint {i} is not finite")));
            }
        }
        Ok(Self { points, visible })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point<f64, D>] {
        &self.points
    }

    pub fn visible(&self) -> &[bool] {
        &self.visible
    }

    pub(crate) fn check_same_len(&self, other: &Self) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::shape(format!("{} vs {} joints", self.len(), other.len())));
        }
        Ok(())
    }
}

impl JointSet<3> {
    /// Image-plane joints under `camera`; visibility is kept.
    pub fn project(&self, camera: &Camera) -> Joints2 {
        JointSet {
            points: self.points.iter().map(|p| camera.project(p)).collect(),
            visible: self.visible.clone(),
        }
    }
}
