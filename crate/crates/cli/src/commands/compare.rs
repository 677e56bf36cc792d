use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use nalgebra::Point2;
use serde_json::{json, Value};
use uvkit::atlas::{similarity_s1, similarity_s2};
use uvkit::distance::{surface_distance_matrix_sampled, uv_distance_matrix_sampled};
use uvkit::{io, SurfaceMetric};

use crate::args::sibling_seam_map;
use crate::error::CliResult;
use crate::report::{num, write_json};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MetricArg {
    Edge,
    Hop,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Closed surface mesh the distances are measured on.
    #[arg(long)]
    pub mesh: PathBuf,
    /// UV layouts to score: an open mesh with 1:1 `vt` (plus a sibling
    /// `.seammap` when it was cut) or the surface mesh with per-corner `vt`.
    #[arg(long = "atlas", required = true)]
    pub atlases: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = MetricArg::Edge)]
    pub metric: MetricArg,
    /// Use every `stride`-th vertex for the all-pairs matrices.
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

/// One UV coordinate per surface vertex.
fn vertex_coords(path: &Path, surface_vertices: usize) -> CliResult<Vec<Point2<f64>>> {
    let data = io::load_mesh(path)?;
    let coords = match (data.atlas, data.vertex_uv) {
        (Some(atlas), _) => {
            let atlas = match sibling_seam_map(path) {
                Some(map) => io::load_atlas(path, Some(&map))?.1,
                None => atlas,
            };
            atlas.per_original_vertex()
        }
        (None, Some(uv)) => uv,
        (None, None) => {
            return Err(uvkit::Error::InvalidArgument(format!("{} has no usable vt records", path.display())).into())
        }
    };
    if coords.len() != surface_vertices {
        return Err(uvkit::Error::Shape(format!(
            "{} covers {} vertices, the surface has {surface_vertices}",
            path.display(),
            coords.len()
        ))
        .into());
    }
    Ok(coords)
}

pub fn run(a: &CompareArgs) -> CliResult<()> {
    let mesh = io::load_mesh(&a.mesh)?.mesh;
    let metric = match a.metric {
        MetricArg::Edge => SurfaceMetric::EdgeLength,
        MetricArg::Hop => SurfaceMetric::HopCount,
    };
    let surface = surface_distance_matrix_sampled(&mesh, metric, a.stride)?;

    let mut rows: Vec<(String, f64, f64)> = vec![(
        "surface".to_string(),
        similarity_s1(&surface, &surface)?,
        similarity_s2(&surface, &surface)?,
    )];
    for path in &a.atlases {
        let coords = vertex_coords(path, mesh.vertex_count())?;
        let uv = uv_distance_matrix_sampled(&coords, a.stride)?;
        let name = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
        rows.push((name, similarity_s1(&surface, &uv)?, similarity_s2(&surface, &uv)?));
    }

    let width = rows.iter().map(|r| r.0.len()).max().unwrap_or(0).max(5);
    println!("{:<width$}  {:>8}  {:>8}", "atlas", "S1", "S2");
    for (name, s1, s2) in &rows {
        println!("{name:<width$}  {s1:>8.4}  {s2:>8.4}");
    }
    if let Some(path) = &a.json {
        let table: Vec<Value> = rows
            .iter()
            .map(|(name, s1, s2)| json!({ "atlas": name, "s1": num(*s1), "s2": num(*s2) }))
            .collect();
        let value = json!({
            "mesh": a.mesh.display().to_string(),
            "metric": match a.metric { MetricArg::Edge => "edge", MetricArg::Hop => "hop" },
            "stride": a.stride,
            "sampled_vertices": surface.n(),
            "rows": table,
        });
        write_json(path, &value)?;
    }
    Ok(())
}
