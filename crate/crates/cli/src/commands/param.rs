use std::path::PathBuf;

use clap::{Args, ValueEnum};
use uvkit::atlas::{build_continuous_atlas, AtlasConfig, Boundary, DistortionConfig};
use uvkit::io;

use crate::error::{CliError, CliResult};
use crate::report::{num, Report};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BoundaryArg {
    Circle,
    Square,
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    /// Closed input mesh (OBJ).
    #[arg(long)]
    pub mesh: PathBuf,
    /// Seam file (`edge i j` lines). Omit for meshes that are already disks.
    #[arg(long)]
    pub seam: Option<PathBuf>,
    /// Symmetric pairs (`pair i j` lines) enabling mirror symmetrization.
    #[arg(long)]
    pub symmetry: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Circle)]
    pub boundary: BoundaryArg,
    #[arg(long, default_value_t = DistortionConfig::default().max_iters)]
    pub max_iters: usize,
    #[arg(long, default_value_t = DistortionConfig::default().step)]
    pub step: f64,
    #[arg(long, default_value_t = DistortionConfig::default().tolerance)]
    pub tolerance: f64,
    /// Keep the optimized atlas without mirror symmetrization.
    #[arg(long)]
    pub no_symmetry: bool,
    /// Output open mesh with `vt` records.
    #[arg(long)]
    pub out: PathBuf,
    /// Seam-map sidecar; defaults to the output path with `.seammap`.
    #[arg(long)]
    pub seam_map: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

pub fn run(a: &ParamArgs) -> CliResult<()> {
    let mut mesh = io::load_mesh(&a.mesh)?.mesh;
    if let Some(sym) = &a.symmetry {
        let pairs = io::load_symmetry(sym, mesh.vertex_count())?;
        mesh = mesh.with_symmetric_pairs(pairs)?;
    }
    let seam = match &a.seam {
        Some(p) => io::load_seam(p)?,
        None => Default::default(),
    };
    let config = AtlasConfig {
        boundary: match a.boundary {
            BoundaryArg::Circle => Boundary::Circle,
            BoundaryArg::Square => Boundary::Square,
        },
        distortion: DistortionConfig {
            max_iters: a.max_iters,
            step: a.step,
            tolerance: a.tolerance,
        },
        skip_symmetry: a.no_symmetry,
    };
    let built = build_continuous_atlas(&mesh, &seam, &config)?;

    let seam_map_path = a.seam_map.clone().unwrap_or_else(|| a.out.with_extension("seammap"));
    io::save_obj(&a.out, &built.open_mesh, Some(&built.atlas))?;
    io::save_seam_map(&seam_map_path, built.atlas.seam_map())?;

    let flips = built.atlas.flipped_faces(&built.open_mesh).len();
    let mut r = Report::new();
    r.set("vertices", built.open_mesh.vertex_count())
        .set("faces", built.open_mesh.face_count())
        .set("energy_before", num(built.distortion.energy_before))
        .set("energy_after", num(built.final_energy))
        .set("iterations", built.distortion.iterations)
        .set("flipped_faces", flips);
    match built.symmetry_residual {
        Some(res) => r.set("symmetry_residual", num(res)),
        None => r.set("symmetry_residual", "none"),
    };
    r.set("atlas", a.out.display().to_string())
        .set("seam_map", seam_map_path.display().to_string());
    r.emit(a.json.as_deref())?;

    if flips > 0 {
        return Err(CliError::Invariant(format!("{flips} flipped faces in the output atlas")));
    }
    if let Some(res) = built.symmetry_residual.filter(|&r| r > 1e-6) {
        return Err(CliError::Invariant(format!("mirror residual {res} exceeds 1e-6")));
    }
    Ok(())
}
