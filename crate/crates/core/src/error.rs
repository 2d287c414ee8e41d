use thiserror::Error;

/// Errors produced by the lattice Helmholtz toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported dimension {0} (supported: 1, 2, 3)")]
    UnsupportedDimension(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty set: {0}")]
    EmptySet(&'static str),

    #[error("grid of size {grid_size} under-resolves support of extent {extent} (need at least {required})")]
    UnderResolved {
        grid_size: usize,
        extent: i64,
        required: usize,
    },

    #[error("window of extent {extent} aliases on grid of size {grid_size}")]
    Aliasing { grid_size: usize, extent: i64 },

    #[error("lambda = {lambda} lies in the exceptional set S0 for d = {dim}")]
    LambdaInExceptionalSet { lambda: f64, dim: usize },

    #[error("lambda = {lambda} outside the convex band {lower} < |lambda| < {upper} for d = {dim}")]
    LambdaOutOfBand {
        lambda: f64,
        dim: usize,
        lower: f64,
        upper: f64,
    },

    #[error("direction is not a unit vector (|omega| = {norm})")]
    NotUnitDirection { norm: f64 },

    #[error("Gauss-map solver did not converge for omega = {omega:?}, lambda = {lambda} (residual {residual:e})")]
    GaussMapNonConvergence {
        omega: Vec<f64>,
        lambda: f64,
        residual: f64,
    },

    #[error("degenerate curvature |K| = {curvature:e} at lambda = {lambda}")]
    DegenerateCurvature { curvature: f64, lambda: f64 },

    #[error("quadrature did not converge (last difference {difference:e}) at target {target:?}")]
    QuadratureNonConvergence { target: Vec<i64>, difference: f64 },

    #[error("limiting-absorption extrapolation failed to converge at target {target:?}")]
    ExtrapolationFailure { target: Vec<i64> },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("ill-posed sampling window: sigma_min = {sigma_min:e}, sigma_max = {sigma_max:e}")]
    IllPosedWindow { sigma_min: f64, sigma_max: f64 },

    #[error("insufficient sample coverage for the polynomial fit (sigma_min = {sigma_min:e}, {unknowns} unknowns, {samples} samples)")]
    InsufficientCoverage {
        sigma_min: f64,
        unknowns: usize,
        samples: usize,
    },

    #[error("support geometry violates the {mode} condition: {detail}")]
    Geometry { mode: &'static str, detail: String },

    #[error("background spectrum vanishes on {skipped} of {total} grid nodes")]
    BackgroundDegenerate { skipped: usize, total: usize },

    #[error("Lippmann-Schwinger iteration diverged (|v|_inf = {potential_norm:e}, last update {last_update:e})")]
    ContractionFailure {
        potential_norm: f64,
        last_update: f64,
    },

    #[error("incident vector is off the dispersion surface (|phi(k) - lambda| = {residual:e})")]
    OffSurface { residual: f64 },

    #[error("I/O error: {0}")]
    Io(String),

    #[error("format error: {0}")]
    Format(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
