use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("tangent of norm {norm} exceeds the injectivity bound {bound}")]
    TangentTooLong { norm: f64, bound: f64 },

    #[error("points are outside a common convex neighbourhood: {0}")]
    NotInDomain(String),

    #[error("geodesic extension |t|*d = {reach} exceeds the injectivity bound {bound}")]
    ExtensionOutOfRange { reach: f64, bound: f64 },

    #[error("payload length mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric positive definite (eigenvalue {0})")]
    NotSpd(f64),

    #[error("point is not on the manifold: {0}")]
    NotOnManifold(String),

    #[error("invalid manifold descriptor: {0}")]
    InvalidDescriptor(String),

    #[error("invalid spline configuration: {0}")]
    InvalidConfig(String),

    #[error("parameter t = {t} outside the spline domain [0, {len}]")]
    DomainError { t: f64, len: f64 },

    #[error("invalid data set: {0}")]
    InvalidData(String),

    #[error("data have zero total variance")]
    ZeroVariance,

    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    #[error("face {0} is degenerate")]
    DegenerateFace(usize),

    #[error("face {0} is reflected or collapsed")]
    OrientationFlip(usize),

    #[error("meshes are not in correspondence: first mismatch at face {0}")]
    Correspondence(usize),

    #[error("mesh is not connected")]
    DisconnectedMesh,

    #[error("linear solve failed: {0}")]
    SolverFailure(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}
