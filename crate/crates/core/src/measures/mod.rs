//! Losses, benchmark metrics, joint regression and Procrustes alignment.

mod joints;
mod losses;
mod metrics;
mod procrustes;
mod regressor;

pub use joints::{Joints2, Joints3, JointSet};
pub use losses::{
    loss_consistent, loss_iuv, loss_joints_2d, loss_joints_3d, loss_map, loss_total, IuvLoss, LossBreakdown,
    LossComponents, LossWeights, Reduction,
};
pub use metrics::{fore_mask, mpjpe, segmentation_metrics, surface_error, Alignment, SegmentationScores};
pub use procrustes::{procrustes_align, Similarity};
pub use regressor::{load_regressor, regress_joints, save_regressor, JointRegressor};
