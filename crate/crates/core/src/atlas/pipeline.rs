use super::{
    area_distortion_energy, cut_mesh, minimize_area_distortion, mirror_residual, symmetrize_atlas, tutte_embed,
    Boundary, DistortionConfig, DistortionReport, SeamSpec, UvAtlas,
};
use crate::error::Result;
use crate::mesh::TriangleMesh;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AtlasConfig {
    pub boundary: Boundary,
    pub distortion: DistortionConfig,
    /// Skip mirror symmetrization even when the mesh carries symmetric pairs.
    pub skip_symmetry: bool,
}

/// Open mesh plus its continuous atlas and what the optimizer did.
#[derive(Debug, Clone)]
pub struct ContinuousAtlas {
    pub open_mesh: TriangleMesh,
    pub atlas: UvAtlas,
    pub distortion: DistortionReport,
    /// Energy of the final atlas; differs from `distortion.energy_after`
    /// when symmetrization moved vertices.
    pub final_energy: f64,
    /// Mirror residual after symmetrization, `None` without symmetric pairs.
    pub symmetry_residual: Option<f64>,
}

/// Cut, flatten, minimize area distortion and symmetrize.
pub fn build_continuous_atlas(mesh: &TriangleMesh, seam: &SeamSpec, config: &AtlasConfig) -> Result<ContinuousAtlas> {
    let cut = cut_mesh(mesh, seam)?;
    let init = tutte_embed(&cut.mesh, config.boundary)?;
    let init = UvAtlas::with_seam_map(init.coords().to_vec(), cut.seam_map)?;
    let (optimized, distortion) = minimize_area_distortion(&init, &cut.mesh, &config.distortion)?;
    let (atlas, symmetry_residual) = match cut.mesh.symmetric_pairs() {
        Some(pairs) if !config.skip_symmetry => {
            let sym = symmetrize_atlas(&optimized, &cut.mesh)?;
            let residual = mirror_residual(sym.coords(), pairs);
            (sym, Some(residual))
        }
        _ => (optimized, None),
    };
    let final_energy = area_distortion_energy(&atlas, &cut.mesh)?;
    Ok(ContinuousAtlas {
        open_mesh: cut.mesh,
        atlas,
        distortion,
        final_energy,
        symmetry_residual,
    })
}
