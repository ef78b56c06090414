use thiserror::Error;

/// Errors raised by model construction, the solvers and the exact oracle.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("time {t} lies outside the protocol window [{t0}, {t_end}]")]
    TimeOutOfDomain { t: f64, t0: f64, t_end: f64 },

    #[error("profile is undefined at t = {t}")]
    ProfileUndefined { t: f64 },

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("the momentum-space path requires a periodic chain")]
    UnsupportedBoundary,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("degenerate mode: E_q = 0 at q = {q}")]
    DegenerateMode { q: f64 },

    #[error("coupling hypotheses violated: {0}")]
    HypothesisViolated(String),

    #[error("CAR defect {defect:.3e} at t = {t} exceeds {limit:.3e}; reduce dt")]
    CarViolation { t: f64, defect: f64, limit: f64 },

    #[error("invalid step size: {0}")]
    InvalidStep(String),

    #[error("Bessel order {n} is beyond the supported range |n| <= {max}")]
    BesselOrder { n: i64, max: i64 },

    #[error("near-singular implicit Volterra step at t = {t}; reduce the step size")]
    SingularStep { t: f64 },

    #[error("time grid mismatch: {0}")]
    GridMismatch(String),

    #[error("band-edge singularity: |Omega| = {omega} is within 1e-9 of g = {g}")]
    BandEdge { omega: f64, g: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("system too large for the exact oracle: {n} sites (limit {limit})")]
    TooLarge { n: usize, limit: usize },

    #[error("unitarity defect {defect:.3e} exceeds 1e-10")]
    Unitarity { defect: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
