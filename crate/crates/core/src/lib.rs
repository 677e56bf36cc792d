//! Single-chart UV atlases for closed triangle meshes and the machinery
//! around them: location maps, IUV correspondence images, image/UV feature
//! transfer, training losses and evaluation metrics.
//!
//! UV coordinates live in `[0, 1]²` with `v` growing downward, the same way
//! image rows do. OBJ files store `1 − v` in their `vt` records.

pub mod atlas;
pub mod codec;
pub mod distance;
pub mod error;
pub mod io;
pub mod measures;
pub mod mesh;
pub mod uvt;

pub use atlas::UvAtlas;
pub use codec::{Camera, GridTensor, IuvImage, LocationMap};
pub use distance::{DistanceMatrix, SurfaceMetric};
pub use error::{Error, Result};
pub use mesh::TriangleMesh;
