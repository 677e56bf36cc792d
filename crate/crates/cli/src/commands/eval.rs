use std::path::PathBuf;

use clap::{Args, ValueEnum};
use uvkit::codec::DEFAULT_THRESHOLD;
use uvkit::measures::{
    fore_mask, load_regressor, loss_consistent, loss_iuv, loss_joints_2d, loss_joints_3d, loss_map, loss_total, mpjpe,
    regress_joints, segmentation_metrics, surface_error, Alignment, LossComponents, LossWeights, Reduction,
};
use uvkit::uvt::read_uvt;
use uvkit::{io, GridTensor, IuvImage, LocationMap};

use crate::args::{usage, CameraArg};
use crate::error::CliResult;
use crate::report::{num, Report};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ReductionArg {
    Mean,
    Sum,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Predicted mesh (OBJ); vertex order must match the ground truth.
    #[arg(long, requires = "gt_mesh")]
    pub pred_mesh: Option<PathBuf>,
    #[arg(long, requires = "pred_mesh")]
    pub gt_mesh: Option<PathBuf>,
    /// Joint regressor (`k n nnz` header, `row col value` lines).
    #[arg(long, requires = "pred_mesh")]
    pub regressor: Option<PathBuf>,
    /// Camera `s,tx,ty` for 2D joints and the consistency loss.
    #[arg(long, allow_hyphen_values = true)]
    pub camera: Option<CameraArg>,
    /// Predicted IUV image (UVT).
    #[arg(long)]
    pub pred_iuv: Option<PathBuf>,
    #[arg(long)]
    pub gt_iuv: Option<PathBuf>,
    /// Predicted location map (UVT).
    #[arg(long)]
    pub pred_map: Option<PathBuf>,
    #[arg(long, requires = "pred_map")]
    pub gt_map: Option<PathBuf>,
    /// Weight map (UVT, H×W×1); all ones when omitted.
    #[arg(long, requires = "gt_map")]
    pub weight_map: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
    #[arg(long, value_enum, default_value_t = ReductionArg::Mean)]
    pub reduction: ReductionArg,
    #[arg(long, default_value_t = LossWeights::default().fore)]
    pub lambda_fore: f64,
    #[arg(long, default_value_t = LossWeights::default().uv)]
    pub lambda_uv: f64,
    #[arg(long, default_value_t = LossWeights::default().consistency)]
    pub lambda_con: f64,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

pub fn run(a: &EvalArgs) -> CliResult<()> {
    let weights = LossWeights::new(a.lambda_fore, a.lambda_uv, a.lambda_con)?;
    let reduction = match a.reduction {
        ReductionArg::Mean => Reduction::Mean,
        ReductionArg::Sum => Reduction::Sum,
    };
    let camera = a.camera.map(|c| c.camera()).transpose()?;
    let mut r = Report::new();
    let mut parts = LossComponents::default();
    let mut have = [false; 5];

    if let (Some(pred), Some(gt)) = (&a.pred_mesh, &a.gt_mesh) {
        let pred = io::load_mesh(pred)?.mesh;
        let gt = io::load_mesh(gt)?.mesh;
        r.set("surface_error_mm", num(surface_error(pred.positions(), gt.positions())?));
        if let Some(path) = &a.regressor {
            let reg = load_regressor(path)?;
            let pj = regress_joints(pred.positions(), &reg)?;
            let gj = regress_joints(gt.positions(), &reg)?;
            r.set("mpjpe_mm", num(mpjpe(&pj, &gj, Alignment::None)?));
            r.set("mpjpe_pa_mm", num(mpjpe(&pj, &gj, Alignment::Procrustes)?));
            parts.joints_3d = loss_joints_3d(&pj, &gj, reduction)?;
            have[2] = true;
            r.set("loss_joints_3d", num(parts.joints_3d));
            if let Some(cam) = &camera {
                parts.joints_2d = loss_joints_2d(&pj.project(cam), &gj.project(cam), reduction)?;
                have[3] = true;
                r.set("loss_joints_2d", num(parts.joints_2d));
            }
        }
    }

    let gt_iuv = a.gt_iuv.as_ref().map(|p| read_uvt(p).and_then(|t| IuvImage::try_from(&t))).transpose()?;
    if let (Some(pred), Some(gt)) = (&a.pred_iuv, &gt_iuv) {
        let pred = IuvImage::try_from(&read_uvt(pred)?)?;
        let seg = segmentation_metrics(&fore_mask(&pred, a.threshold)?, &fore_mask(gt, a.threshold)?)?;
        r.set("accuracy", num(seg.accuracy)).set("f1", num(seg.f1));
        let l = loss_iuv(&pred, gt, &weights, reduction)?;
        parts.iuv = l.total;
        have[0] = true;
        r.set("loss_iuv", num(l.total))
            .set("loss_iuv_fore", num(l.fore_bce))
            .set("loss_iuv_uv", num(l.uv_l1));
    }

    let pred_map = a.pred_map.as_ref().map(|p| read_uvt(p).and_then(|t| LocationMap::try_from(&t))).transpose()?;
    if let (Some(pred), Some(gt)) = (&pred_map, &a.gt_map) {
        let gt = LocationMap::try_from(&read_uvt(gt)?)?;
        let w = match &a.weight_map {
            Some(p) => GridTensor::try_from(&read_uvt(p)?)?,
            None => GridTensor::from_data(gt.height(), gt.width(), 1, vec![1.0; gt.height() * gt.width()])?,
        };
        parts.map = loss_map(pred, &gt, &w, reduction)?;
        have[1] = true;
        r.set("loss_map", num(parts.map));
    }
    if let (Some(map), Some(gt), Some(cam)) = (&pred_map, &gt_iuv, &camera) {
        parts.consistency = loss_consistent(map, gt, cam, reduction)?;
        have[4] = true;
        r.set("loss_consistent", num(parts.consistency));
    }

    if have.iter().all(|&h| h) {
        let total = loss_total(&parts, &weights)?;
        r.set("loss_total", num(total.total));
    }
    if r.to_json().as_object().is_some_and(|m| m.is_empty()) {
        return Err(usage("nothing to evaluate: pass a pred/gt pair of meshes, IUV images or location maps"));
    }
    r.emit(a.json.as_deref())
}
