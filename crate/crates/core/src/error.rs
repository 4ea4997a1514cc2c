use thiserror::Error;

/// Errors raised by the analysis pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid vector: {0}")]
    InvalidVector(String),

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("spectral blow-up; rescale input")]
    SpectralBlowUp,

    #[error("matrix not sub-unitized; apply visualization scaling first")]
    NotSubUnitized,

    #[error("Kleene star diverges; pass A/λ(A)")]
    KleeneDiverges,

    #[error("no critical graph (nilpotent pattern)")]
    NoCriticalGraph,

    #[error("strict visualization failed at edge ({i}, {j}): scaled entry {value}")]
    VisualizationFailed { i: usize, j: usize, value: f64 },

    #[error("node set is not strongly connected")]
    NotStronglyConnected,

    #[error("{rho} is not an eigenvalue of the matrix")]
    NotInSpectrum { rho: f64 },

    #[error("orbit closure failed: image of extremal {index} is not proportional to any extremal")]
    OrbitClosure { index: usize },

    #[error("extremal action is not a permutation")]
    NotAPermutation,

    #[error("vector lies outside the core")]
    OutsideCore,

    #[error("{0} is only defined in max-times algebra")]
    MaxTimesOnly(&'static str),

    #[error("power must be at least 1")]
    ZeroPower,

    #[error("no period found in the available window")]
    PeriodUndetermined,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
