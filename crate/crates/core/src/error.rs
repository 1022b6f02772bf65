use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension must be at least 1")]
    EmptyDimension,

    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("matrix is singular or rank deficient: {0}")]
    Singular(&'static str),

    #[error("maximum is unbounded: objective still increasing at {last_arg:e}")]
    UnboundedMaximum { last_arg: f64 },

    #[error("auxiliary program is unbounded (dual unbounded / primal infeasible)")]
    UnboundedAux,

    #[error("program is infeasible: {0}")]
    Infeasible(String),

    #[error(
        "solver did not converge after {iterations} iterations \
         (primal residual {primal_residual:e}, dual residual {dual_residual:e})"
    )]
    NonConverged {
        iterations: usize,
        primal_residual: f64,
        dual_residual: f64,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Errors caused by the caller's configuration rather than by numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidConfig(_)
                | Error::DimensionMismatch { .. }
                | Error::EmptyDimension
                | Error::Parse(_)
        )
    }

    /// Process exit code used by the `rrd` binary.
    pub fn exit_code(&self) -> i32 {
        if self.is_config() {
            2
        } else if matches!(self, Error::Io { .. }) {
            1
        } else {
            3
        }
    }
}
