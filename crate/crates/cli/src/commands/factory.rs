//! Supervision-data factory.
//!
//! The manifest is JSON:
//!
//! ```json
//! {
//!   "config": {
//!     "atlas": "atlas.obj", "seam_map": "atlas.seammap", "template": null,
//!     "uv_resolution": 128, "image_resolution": [256, 256],
//!     "alpha": 2.0, "seeds": "body.seeds", "threshold": 0.5
//!   },
//!   "samples": [{ "name": "s0", "mesh": "pose.obj", "camera": [120, 128, 20] }]
//! }
//! ```
//!
//! Relative paths resolve against the manifest's directory. `template`
//! defaults to the atlas mesh itself. Outputs land under `--out`: the weight
//! and reference maps once, then `samples/<name>/` per sample, and
//! `summary.json` last.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Value};
use uvkit::codec::{encode_location_map, preview, reference_location_map, render_iuv, weight_map, DEFAULT_THRESHOLD};
use uvkit::measures::{loss_consistent, Reduction};
use uvkit::uvt::{write_uvt, UvtTensor};
use uvkit::{io, Camera, TriangleMesh, UvAtlas};

use super::codec::{write_iuv, write_location};
use crate::args::{load_atlas, posed_open_mesh};
use crate::error::{CliError, CliResult};
use crate::report::{num, write_json};

/// Generated data must reproject onto its own pixels within this floor (px²).
pub const CONSISTENCY_FLOOR: f64 = 1.0;

#[derive(Debug, Args)]
pub struct FactoryArgs {
    /// Manifest JSON.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Dataset directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
    /// Skip PNG previews.
    #[arg(long)]
    pub no_png: bool,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Size {
    Square(usize),
    Rect([usize; 2]),
}

impl Size {
    fn dims(&self) -> (usize, usize) {
        match *self {
            Size::Square(n) => (n, n),
            Size::Rect([h, w]) => (h, w),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    atlas: PathBuf,
    seam_map: Option<PathBuf>,
    template: Option<PathBuf>,
    uv_resolution: Size,
    image_resolution: Size,
    alpha: f64,
    seeds: PathBuf,
    #[serde(default = "default_threshold")]
    threshold: f64,
}

fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Sample {
    name: String,
    mesh: PathBuf,
    camera: [f64; 3],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    config: Config,
    #[serde(default)]
    samples: Vec<Sample>,
}

struct Shared {
    open: TriangleMesh,
    atlas: UvAtlas,
    uv: (usize, usize),
    image: (usize, usize),
    threshold: f64,
    png: bool,
}

enum SampleError {
    Data(String),
    SelfCheck(String),
}

struct SampleResult {
    consistency: f64,
    foreground: usize,
}

fn manifest_error(path: &Path, msg: impl Into<String>) -> CliError {
    CliError::Manifest {
        path: path.to_path_buf(),
        msg: msg.into(),
    }
}

fn load_manifest(path: &Path) -> CliResult<Manifest> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| manifest_error(path, e.to_string()))?;
    let mut names = std::collections::HashSet::new();
    for s in &manifest.samples {
        let ok = !s.name.is_empty()
            && s.name != "."
            && s.name != ".."
            && !s.name.contains(['/', '\\']);
        if !ok {
            return Err(manifest_error(path, format!("sample name `{}` is not a plain file name", s.name)));
        }
        if !names.insert(s.name.as_str()) {
            return Err(manifest_error(path, format!("duplicate sample name `{}`", s.name)));
        }
    }
    Ok(manifest)
}

fn create_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn run_sample(shared: &Shared, sample: &Sample, mesh_path: &Path, dir: &Path) -> Result<SampleResult, SampleError> {
    let data = |e: CliError| SampleError::Data(e.to_string());
    let [s, tx, ty] = sample.camera;
    let camera = Camera::new(s, tx, ty).map_err(|e| data(e.into()))?;
    let mesh = posed_open_mesh(&shared.open, &shared.atlas, Some(mesh_path)).map_err(data)?;
    let (ih, iw) = shared.image;
    let (uh, uw) = shared.uv;
    let iuv = render_iuv(&mesh, &shared.atlas, &camera, ih, iw).map_err(|e| data(e.into()))?;
    let map = encode_location_map(&mesh, &shared.atlas, uh, uw).map_err(|e| data(e.into()))?;
    create_dir(dir).map_err(data)?;
    let png = |name: &str| shared.png.then(|| dir.join(name));
    write_iuv(&iuv, &dir.join("iuv.uvt"), png("iuv.png").as_deref()).map_err(data)?;
    write_location(&map, &dir.join("location.uvt"), png("location.png").as_deref()).map_err(data)?;

    let foreground = iuv.foreground(shared.threshold).count();
    let consistency = loss_consistent(&map, &iuv, &camera, Reduction::Mean).map_err(|e| data(e.into()))?;
    if consistency > CONSISTENCY_FLOOR {
        return Err(SampleError::SelfCheck(format!(
            "consistency loss {consistency} px² exceeds the {CONSISTENCY_FLOOR} px² floor"
        )));
    }
    Ok(SampleResult {
        consistency,
        foreground,
    })
}

pub fn run(a: &FactoryArgs) -> CliResult<()> {
    let manifest = load_manifest(&a.manifest)?;
    let base = a.manifest.parent().map(Path::to_path_buf).unwrap_or_default();
    let resolve = |p: &Path| if p.is_absolute() { p.to_path_buf() } else { base.join(p) };
    let c = &manifest.config;
    if !(0.0..=1.0).contains(&c.threshold) {
        return Err(manifest_error(&a.manifest, format!("threshold {} outside [0, 1]", c.threshold)));
    }

    let (open, atlas) = load_atlas(&resolve(&c.atlas), c.seam_map.as_deref().map(resolve).as_deref())?;
    let template = posed_open_mesh(&open, &atlas, c.template.as_deref().map(resolve).as_deref())?;
    let seeds = io::load_vertex_list(resolve(&c.seeds))?;
    let uv = c.uv_resolution.dims();
    create_dir(&a.out)?;

    let weights = weight_map(&template, &atlas, &seeds, c.alpha, uv.0, uv.1)?;
    write_uvt(a.out.join("weight.uvt"), &UvtTensor::from(&weights))?;
    let reference = reference_location_map(&template, &atlas, uv.0, uv.1)?;
    write_uvt(a.out.join("reference.uvt"), &UvtTensor::from(&reference))?;
    if !a.no_png {
        preview::save_grid_png(&weights, a.out.join("weight.png"))?;
        preview::save_location_png(&reference, a.out.join("reference.png"))?;
    }

    let shared = Shared {
        open,
        atlas,
        uv,
        image: c.image_resolution.dims(),
        threshold: c.threshold,
        png: !a.no_png,
    };
    let results: Vec<Result<SampleResult, SampleError>> = manifest
        .samples
        .par_iter()
        .map(|s| run_sample(&shared, s, &resolve(&s.mesh), &a.out.join("samples").join(&s.name)))
        .collect();

    let mut failed = 0;
    let mut self_check_failed = false;
    let entries: Vec<Value> = manifest
        .samples
        .iter()
        .zip(&results)
        .map(|(s, res)| match res {
            Ok(r) => {
                println!("sample={} status=ok consistency={} foreground={}", s.name, r.consistency, r.foreground);
                json!({
                    "name": s.name,
                    "status": "ok",
                    "consistency_loss": num(r.consistency),
                    "foreground_pixels": r.foreground,
                    "iuv": format!("samples/{}/iuv.uvt", s.name),
                    "location": format!("samples/{}/location.uvt", s.name),
                })
            }
            Err(e) => {
                failed += 1;
                let (kind, msg) = match e {
                    SampleError::Data(m) => ("failed", m),
                    SampleError::SelfCheck(m) => {
                        self_check_failed = true;
                        ("self_check_failed", m)
                    }
                };
                println!("sample={} status={kind} error={msg}", s.name);
                json!({ "name": s.name, "status": kind, "error": msg })
            }
        })
        .collect();
    let summary = json!({
        "samples": entries,
        "succeeded": manifest.samples.len() - failed,
        "failed": failed,
        "weight_map": "weight.uvt",
        "reference_map": "reference.uvt",
        "uv_resolution": [uv.0, uv.1],
        "image_resolution": [shared.image.0, shared.image.1],
        "consistency_floor": num(CONSISTENCY_FLOOR),
    });
    write_json(&a.out.join("summary.json"), &summary)?;
    println!("samples={} failed={failed}", manifest.samples.len());

    if self_check_failed {
        Err(CliError::Invariant("generated data failed its consistency self-check".to_string()))
    } else if failed > 0 {
        Err(CliError::SamplesFailed(failed))
    } else {
        Ok(())
    }
}
