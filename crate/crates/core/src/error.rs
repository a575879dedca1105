use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {dim}: need at least {min}")]
    InvalidDimension { dim: usize, min: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{name} = {value} is outside its domain ({requirement})")]
    Domain {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error("tridiagonal QL failed to converge for eigenvalue {index} after {iterations} sweeps (residual off-diagonal {residual:e})")]
    Convergence {
        index: usize,
        iterations: usize,
        residual: f64,
    },

    #[error("degenerate gap between levels {lower} and {upper} (omega = {omega:e})")]
    DegenerateGap {
        lower: usize,
        upper: usize,
        omega: f64,
    },

    #[error("state is not normalized (norm^2 = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("negative probability {value} at index {index}")]
    NegativeProbability { index: usize, value: f64 },

    #[error("site {site} outside 1..={dim}")]
    SiteOutOfRange { site: usize, dim: usize },

    #[error("time grid must be strictly increasing (violated at index {index})")]
    TimeGrid { index: usize },

    #[error("circuit geometry: s = {s}, a = {a} violates 1 <= a and s >= a + 6")]
    Geometry { s: usize, a: usize },

    #[error("register input has control {control:+} but branch {branch} requires {required:+}")]
    BranchMismatch {
        branch: &'static str,
        control: i8,
        required: i8,
    },
}
