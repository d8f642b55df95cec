use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("quadrature did not converge: {context} (last change {last_change:.3e})")]
    NonConvergence { context: String, last_change: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no feasible power found up to {limit} (Q = {q}, N = {n})")]
    NoUpperBound { limit: f64, q: f64, n: f64 },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("invalid mixture: {0}")]
    InvalidMixture(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("{0}: file contains no data rows")]
    EmptyFile(String),

    #[error("monotonicity violated: {0}")]
    Monotonicity(String),

    #[error("at P = {p}: {source}")]
    AtPower {
        p: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn at_power(self, p: f64) -> Self {
        Error::AtPower {
            p,
            source: Box::new(self),
        }
    }

    /// Innermost error, skipping sweep annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtPower { source, .. } => source.root(),
            other => other,
        }
    }
}
