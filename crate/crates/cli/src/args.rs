//! Flag value parsers and shared input loading.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use uvkit::atlas::lift_positions;
use uvkit::{io, Camera, TriangleMesh, UvAtlas};

use crate::error::{CliError, CliResult};

/// `N` for a square grid or `HxW`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Resolution {
    pub height: usize,
    pub width: usize,
}

impl FromStr for Resolution {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad resolution `{s}`"));
        let (height, width) = match s.split_once(['x', 'X']) {
            Some((h, w)) => (parse(h)?, parse(w)?),
            None => {
                let n = parse(s)?;
                (n, n)
            }
        };
        if height == 0 || width == 0 {
            return Err(format!("resolution `{s}` must be positive"));
        }
        Ok(Self { height, width })
    }
}

/// `s,tx,ty`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraArg(pub [f64; 3]);

impl FromStr for CameraArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let vals: Vec<f64> = s
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| format!("bad camera `{s}`, expected s,tx,ty"))?;
        match vals[..] {
            [a, b, c] => Ok(Self([a, b, c])),
            _ => Err(format!("bad camera `{s}`, expected s,tx,ty")),
        }
    }
}

impl CameraArg {
    pub fn camera(&self) -> CliResult<Camera> {
        let [s, tx, ty] = self.0;
        Ok(Camera::new(s, tx, ty)?)
    }
}

/// Seam-map sidecar next to an atlas OBJ: same stem, `.seammap` extension.
pub fn sibling_seam_map(obj: &Path) -> Option<PathBuf> {
    let p = obj.with_extension("seammap");
    p.is_file().then_some(p)
}

/// Open mesh and atlas from an OBJ with `vt`, using the explicit seam map,
/// else the sibling sidecar, else the identity.
pub fn load_atlas(obj: &Path, seam_map: Option<&Path>) -> CliResult<(TriangleMesh, UvAtlas)> {
    let sidecar = seam_map.map(Path::to_path_buf).or_else(|| sibling_seam_map(obj));
    Ok(io::load_atlas(obj, sidecar.as_deref())?)
}

/// The open mesh with positions from `posed` when given. `posed` may be
/// a mesh with the original (uncut) connectivity or a copy of the open mesh.
pub fn posed_open_mesh(open: &TriangleMesh, atlas: &UvAtlas, posed: Option<&Path>) -> CliResult<TriangleMesh> {
    let Some(path) = posed else {
        return Ok(open.clone());
    };
    let posed = io::load_mesh(path)?.mesh;
    if posed.vertex_count() == open.vertex_count() && posed.faces() == open.faces() {
        return Ok(open.with_positions(posed.positions().to_vec())?);
    }
    if posed.vertex_count() != atlas.original_vertex_count() {
        return Err(uvkit::Error::Shape(format!(
            "{} has {} vertices; the atlas expects {} (uncut) or {} (open)",
            path.display(),
            posed.vertex_count(),
            atlas.original_vertex_count(),
            open.vertex_count()
        ))
        .into());
    }
    Ok(lift_positions(open, atlas, posed.positions())?)
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
