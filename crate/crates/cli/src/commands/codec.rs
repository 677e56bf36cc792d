use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use uvkit::codec::{
    decode_vertices, encode_location_map, preview, render_iuv, transfer_to_image, transfer_to_uv, DEFAULT_THRESHOLD,
};
use uvkit::uvt::{read_uvt, write_uvt, UvtTensor};
use uvkit::{io, GridTensor, IuvImage, LocationMap};

use crate::args::{load_atlas, posed_open_mesh, CameraArg, Resolution};
use crate::error::CliResult;
use crate::report::Report;

#[derive(Debug, Args)]
pub struct AtlasInput {
    /// Open mesh with per-vertex `vt` records.
    #[arg(long)]
    pub atlas: PathBuf,
    /// Seam-map sidecar; defaults to the atlas path with `.seammap` if present.
    #[arg(long)]
    pub seam_map: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[command(flatten)]
    pub input: AtlasInput,
    /// Posed mesh (uncut or open connectivity); defaults to the atlas mesh.
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    #[arg(long, default_value = "128")]
    pub resolution: Resolution,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub png: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[command(flatten)]
    pub input: AtlasInput,
    /// Location map (UVT, H×W×4).
    #[arg(long)]
    pub map: PathBuf,
    /// Output OBJ: the open mesh with decoded positions.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[command(flatten)]
    pub input: AtlasInput,
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    /// Weak-perspective camera `s,tx,ty`.
    #[arg(long, allow_hyphen_values = true)]
    pub camera: CameraArg,
    #[arg(long, default_value = "256")]
    pub resolution: Resolution,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub png: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Direction {
    /// Scatter an image-space grid into UV space.
    ToUv,
    /// Sample a location map at every foreground pixel.
    ToImage,
}

#[derive(Debug, Args)]
pub struct TransferArgs {
    #[arg(long, value_enum)]
    pub direction: Direction,
    /// IUV image (UVT, h×w×3).
    #[arg(long)]
    pub iuv: PathBuf,
    /// Image-space grid (UVT, h×w×C) for `to-uv`.
    #[arg(long)]
    pub image: Option<PathBuf>,
    /// Location map (UVT, H×W×4) for `to-image`.
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// UV grid size for `to-uv`.
    #[arg(long, default_value = "128")]
    pub resolution: Resolution,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
    #[arg(long)]
    pub out: PathBuf,
    /// Per-texel contribution counts for `to-uv`, as f32 H×W×1.
    #[arg(long)]
    pub counts: Option<PathBuf>,
}

pub(crate) fn write_location(map: &LocationMap, out: &Path, png: Option<&Path>) -> CliResult<()> {
    write_uvt(out, &UvtTensor::from(map))?;
    if let Some(p) = png {
        preview::save_location_png(map, p)?;
    }
    Ok(())
}

pub(crate) fn write_iuv(iuv: &IuvImage, out: &Path, png: Option<&Path>) -> CliResult<()> {
    write_uvt(out, &UvtTensor::from(iuv))?;
    if let Some(p) = png {
        preview::save_iuv_png(iuv, p)?;
    }
    Ok(())
}

pub fn encode(a: &EncodeArgs) -> CliResult<()> {
    let (open, atlas) = load_atlas(&a.input.atlas, a.input.seam_map.as_deref())?;
    let mesh = posed_open_mesh(&open, &atlas, a.mesh.as_deref())?;
    let map = encode_location_map(&mesh, &atlas, a.resolution.height, a.resolution.width)?;
    write_location(&map, &a.out, a.png.as_deref())?;
    let mut r = Report::new();
    r.set("height", map.height())
        .set("width", map.width())
        .set("valid_texels", map.valid_count())
        .set("out", a.out.display().to_string());
    r.emit(None)
}

pub fn decode(a: &DecodeArgs) -> CliResult<()> {
    let (open, atlas) = load_atlas(&a.input.atlas, a.input.seam_map.as_deref())?;
    let map = LocationMap::try_from(&read_uvt(&a.map)?)?;
    let vertices = decode_vertices(&map, &atlas)?;
    let mesh = open.with_positions(vertices)?;
    io::save_obj(&a.out, &mesh, Some(&atlas))?;
    let mut r = Report::new();
    r.set("vertices", mesh.vertex_count()).set("out", a.out.display().to_string());
    r.emit(None)
}

pub fn render(a: &RenderArgs) -> CliResult<()> {
    let (open, atlas) = load_atlas(&a.input.atlas, a.input.seam_map.as_deref())?;
    let mesh = posed_open_mesh(&open, &atlas, a.mesh.as_deref())?;
    let camera = a.camera.camera()?;
    let iuv = render_iuv(&mesh, &atlas, &camera, a.resolution.height, a.resolution.width)?;
    let fg = iuv.foreground(1.0).count();
    if fg == 0 {
        eprintln!("warning: mesh is entirely outside the frame");
    }
    write_iuv(&iuv, &a.out, a.png.as_deref())?;
    let mut r = Report::new();
    r.set("height", iuv.height())
        .set("width", iuv.width())
        .set("foreground_pixels", fg)
        .set("out", a.out.display().to_string());
    r.emit(None)
}

pub fn transfer(a: &TransferArgs) -> CliResult<()> {
    let iuv = IuvImage::try_from(&read_uvt(&a.iuv)?)?;
    let need = |p: &Option<PathBuf>, flag: &str| {
        p.clone()
            .ok_or_else(|| crate::args::usage(format!("--{flag} is required for this direction")))
    };
    let mut r = Report::new();
    match a.direction {
        Direction::ToUv => {
            let image = GridTensor::try_from(&read_uvt(need(&a.image, "image")?)?)?;
            let out = transfer_to_uv(&image, &iuv, a.resolution.height, a.resolution.width, a.threshold)?;
            write_uvt(&a.out, &UvtTensor::from(&out.values))?;
            if let Some(p) = &a.counts {
                let counts = GridTensor::from_data(
                    a.resolution.height,
                    a.resolution.width,
                    1,
                    out.counts.iter().map(|&c| c as f64).collect(),
                )?;
                write_uvt(p, &UvtTensor::from(&counts))?;
            }
            r.set("filled_texels", out.counts.iter().filter(|&&c| c > 0).count());
        }
        Direction::ToImage => {
            let map = LocationMap::try_from(&read_uvt(need(&a.map, "map")?)?)?;
            let out = transfer_to_image(&map, &iuv, a.threshold)?;
            write_uvt(&a.out, &UvtTensor::from(&out))?;
            r.set("foreground_pixels", iuv.foreground(a.threshold).count());
        }
    }
    r.set("out", a.out.display().to_string());
    r.emit(None)
}
