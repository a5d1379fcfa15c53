use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("transform is not symplectic (residual {residual:.3e})")]
    NotSymplectic { residual: f64 },

    #[error("matrix is rank deficient")]
    RankDeficient,

    #[error("gain must be nonzero and finite, got {0}")]
    InvalidGain(f64),

    #[error("transducer has no transmission path")]
    NoTransmission,

    #[error("transmission path vanishes; impedance gain is undefined")]
    ZeroTransmissionPath,

    #[error("transducer is already impedance matched")]
    AlreadyMatched,

    #[error("transducer class {0} cannot be corrected by interference")]
    Uncorrectable(String),

    #[error("interaction strengths are degenerate: {0}")]
    DegenerateStrengths(String),

    #[error("overdamped regime (kappa = {kappa}, g = {g}) is not supported; need kappa < 4g")]
    OverdampedUnsupported { kappa: f64, g: f64 },

    #[error("system matrix amplifies (singular value {singular_value})")]
    GainDetected { singular_value: f64 },

    #[error("truncation {n_trunc} too small; need at least {required}")]
    TruncationTooSmall { n_trunc: usize, required: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numerical inconsistency: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
