use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("{path}:{line}: face {face} has a corner without texture coordinates")]
    MissingUv {
        path: String,
        line: usize,
        face: usize,
    },

    #[error("{path}:{line}: material `{name}` is not defined in any material library")]
    UnknownMaterial {
        path: String,
        line: usize,
        name: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("mesh is not manifold ({edges} non-manifold half-edges, {vertices} non-manifold vertices); run repair first")]
    NonManifold { edges: usize, vertices: usize },

    #[error("corrupted connectivity: {0}")]
    Topology(String),

    #[error("expected a connected mesh, found {0} components")]
    Disconnected(usize),

    #[error("expected a closed mesh, found {0} boundary loops")]
    OpenMesh(usize),

    #[error("boundary loop is not a boundary of this mesh")]
    LoopNotFound,

    #[error("boundary loop has {0} vertices, need at least {1}")]
    LoopTooShort(usize, usize),

    #[error("expected a topological disk, found genus {genus} with {boundaries} boundary loops")]
    NotADisk { genus: usize, boundaries: usize },

    #[error("threshold must be positive and finite, got {0}")]
    InvalidThreshold(f64),

    #[error("degenerate triangle at face {0}")]
    DegenerateFace(usize),

    #[error("boundary side {0} has zero length")]
    ZeroLengthSide(usize),

    #[error("corner vertices do not lie on the boundary loop in order")]
    BadCorners,

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("singular system: interior vertex {0} has no usable incident weight")]
    Singular(usize),

    #[error("source texture index {index} out of range ({count} textures)")]
    TextureIndex { index: usize, count: usize },

    #[error("face {0} references two different source textures")]
    MixedTextures(usize),

    #[error("nothing to rasterize: mesh has no faces")]
    EmptyMesh,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{stage} failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn in_stage(self, stage: &'static str) -> Self {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }
}
