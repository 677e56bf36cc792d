use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("face {face} references vertex {index} but the mesh has {count} vertices")]
    IndexOutOfRange {
        face: usize,
        index: usize,
        count: usize,
    },

    #[error("face {face} is degenerate (repeated vertex index)")]
    DegenerateFace { face: usize },

    #[error("edge ({a}, {b}) is shared by {faces} faces")]
    NonManifoldEdge { a: usize, b: usize, faces: usize },

    #[error("inconsistent face orientation on edge ({a}, {b})")]
    InconsistentOrientation { a: usize, b: usize },

    #[error("symmetric pairs are not an involution at vertex {vertex}")]
    BadSymmetry { vertex: usize },

    #[error("mesh is disconnected: {components} components")]
    Disconnected { components: usize },

    #[error("cut mesh is not a disk: Euler characteristic {euler}, {boundary_loops} boundary loops")]
    Topology { euler: i64, boundary_loops: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid container: {0}")]
    Container(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
