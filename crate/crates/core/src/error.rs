use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid quarter `{0}`: expected YYYYQn or YYYY-Qn with n in 1..=4")]
    ParseQuarter(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("missing column `{0}`")]
    MissingColumn(String),

    #[error("duplicate column `{0}`")]
    DuplicateColumn(String),

    #[error("singular design matrix; collinear columns: {}", .0.join(", "))]
    SingularDesign(Vec<String>),

    #[error("inconsistent data: {0}")]
    Inconsistent(String),

    #[error("adjustment coefficient is zero; long-run coefficients are undefined")]
    ZeroAdjustment,

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad arguments or configuration values.
    Config,
    /// Malformed, missing or inconsistent input data.
    Data,
    /// Singular designs, domain violations and other numerical failures.
    Numerical,
    Io,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidArgument(_) | Error::ParseQuarter(_) => ErrorKind::Config,
            Error::Parse { .. }
            | Error::InsufficientData(_)
            | Error::MissingColumn(_)
            | Error::DuplicateColumn(_)
            | Error::Inconsistent(_) => ErrorKind::Data,
            Error::Domain(_) | Error::SingularDesign(_) | Error::ZeroAdjustment => {
                ErrorKind::Numerical
            }
            Error::Io { .. } => ErrorKind::Io,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
