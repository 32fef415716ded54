use thiserror::Error;

use crate::state::Defect;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("duplicate subsystem label `{0}`")]
    DuplicateLabel(String),

    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),

    #[error("subsystem `{0}` has dimension 0")]
    ZeroDimension(String),

    #[error("invalid label selection: {0}")]
    Selection(String),

    #[error("rank {rank} outside 1..={dim}")]
    RankOutOfRange { rank: usize, dim: usize },

    #[error("invalid state: {}", format_defects(.0))]
    InvalidState(Vec<Defect>),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("state is not pure (largest eigenvalue {0})")]
    NotPure(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate truncation: weight {lambda:e} is at or below {threshold:e}")]
    DegenerateTruncation { lambda: f64, threshold: f64 },

    #[error("undefined extended-real operation: {0}")]
    Undefined(&'static str),

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.into(),
        }
    }

    /// Errors caused by malformed input rather than by a physical defect of the
    /// data (an invalid state or channel, a failed truncation).
    pub fn is_structural(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch(_)
                | Error::DuplicateLabel(_)
                | Error::UnknownLabel(_)
                | Error::ZeroDimension(_)
                | Error::Selection(_)
                | Error::RankOutOfRange { .. }
                | Error::Parse { .. }
        )
    }
}

fn format_defects(defects: &[Defect]) -> String {
    defects
        .iter()
        .map(|d| format!("{:?} defect {:.3e}", d.invariant, d.magnitude))
        .collect::<Vec<_>>()
        .join("; ")
}
