use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors shared by every module of the library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A matrix required to have full numerical rank does not.
    #[error("rank deficient: numerical rank {rank} of {expected} (sigma_min/sigma_max = {ratio:.3e})")]
    RankDeficient {
        rank: usize,
        expected: usize,
        ratio: f64,
    },

    /// The scheme matrix A built from a sample set is numerically rank
    /// deficient, so the error theorems do not apply.
    #[error("sample set not poised: sigma_min/sigma_max = {ratio:.3e} is at or below rank tolerance {rtol:.3e}")]
    NotPoised { ratio: f64, rtol: f64 },

    /// A direction and its reflection are antiparallel; the rotation plane
    /// (and hence the rotation matrix) is not unique.
    #[error("degenerate rotation: direction {index} is antiparallel to its reflection")]
    DegenerateRotation { index: usize },

    /// The hypothesis C * eps * kappa(A) < 1 of the floating point error
    /// theorems fails.
    #[error("stability condition violated: C * eps * kappa(A) = {value:.6e} >= 1")]
    StabilityViolation { value: f64 },

    /// GACSG delta-min needs the caller to pick a dominant error regime.
    #[error("GACSG delta-min requires a regime (rotation-dominated or curvature-dominated)")]
    MissingRegime,

    #[error("unknown test function `{0}`")]
    UnknownFunction(String),

    #[error("parse error: {0}")]
    Parse(String),
}
