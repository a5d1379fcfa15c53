use std::fmt;
use std::path::Path;

/// Process exit status for each failure kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    /// Bad input files or parameter values.
    Validation,
    /// Valid input that the requested operation cannot handle.
    Domain,
    /// Malformed command line.
    Usage,
}

impl ExitKind {
    pub fn code(self) -> i32 {
        match self {
            ExitKind::Validation => 2,
            ExitKind::Domain => 3,
            ExitKind::Usage => 64,
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub kind: ExitKind,
    pub message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        CliError {
            kind: ExitKind::Validation,
            message: message.into(),
        }
    }

    pub fn domain(message: impl Into<String>) -> Self {
        CliError {
            kind: ExitKind::Domain,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            kind: ExitKind::Usage,
            message: message.into(),
        }
    }

    pub fn io(path: &Path, err: impl fmt::Display) -> Self {
        CliError::validation(format!("{}: {err}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        self.kind.code()
    }
}

impl From<transduction::Error> for CliError {
    fn from(err: transduction::Error) -> Self {
        use transduction::Error as E;
        let kind = match err {
            E::NotSymplectic { .. }
            | E::InvalidGain(_)
            | E::InvalidParameter(_)
            | E::OverdampedUnsupported { .. }
            | E::GainDetected { .. }
            | E::TruncationTooSmall { .. } => ExitKind::Validation,
            E::RankDeficient
            | E::NoTransmission
            | E::ZeroTransmissionPath
            | E::AlreadyMatched
            | E::Uncorrectable(_)
            | E::DegenerateStrengths(_)
            | E::Inconsistent(_) => ExitKind::Domain,
        };
        let message = match err {
            E::TruncationTooSmall { required, .. } => {
                format!("{err}; rerun with --n-trunc {required} or set TRANSDUCE_NTRUNC")
            }
            _ => err.to_string(),
        };
        CliError { kind, message }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
