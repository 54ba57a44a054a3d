use thiserror::Error;

/// Every failure the laboratory can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("vorticity has non-zero mean {mean:e} (sup norm {sup:e}); the Laplacian cannot be inverted")]
    NonZeroMean { mean: f64, sup: f64 },

    #[error("bubble scale {ell} too large: the support radius 4*ell must stay below 1")]
    ScaleTooLarge { ell: f64 },

    #[error("under-resolved: {0}")]
    UnderResolved(String),

    #[error("time step {dt:e} violates the CFL limit {limit:e}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("small-scale field has zero L2 norm")]
    ZeroSmallScale,

    #[error("deformation gradient determinant drifted to {det}")]
    DeterminantDrift { det: f64 },

    #[error("point at radius {radius:e} is too close to the origin (minimum {min:e})")]
    TooCloseToOrigin { radius: f64, min: f64 },

    #[error("degenerate snapshot: {0}")]
    DegenerateSnapshot(String),

    #[error("shell mismatch: {0}")]
    ShellMismatch(String),

    #[error("viscosity {nu:e} is below the resolvable dissipation scale {limit:e}")]
    ViscosityUnderresolved { nu: f64, limit: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed snapshot file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
