use thiserror::Error;

/// Errors raised across the toolkit.
///
/// Variants fall in two families: input validation (bad files, bad
/// configuration, out-of-domain arguments) and computation (numerical
/// failure during projection, estimation or simulation). The CLI maps the
/// two families to distinct exit codes through [`Error::is_validation`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("degenerate economy: (1+g)(1+pi) = {factor} is not positive")]
    DegenerateEconomy { factor: f64 },

    #[error("year {year}: {source}")]
    AtYear {
        year: i32,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty sample set")]
    EmptySamples,

    #[error("missing data: {0}")]
    Missing(String),

    #[error("missing year {year} in {what}")]
    MissingYear { what: String, year: i32 },

    #[error("unit mismatch for column `{column}`: manifest declares {declared}, file declares {found}")]
    UnitMismatch {
        column: String,
        declared: String,
        found: String,
    },

    #[error("parse error in {file}: {msg}")]
    Parse { file: String, msg: String },

    #[error("rank-deficient design matrix; collinear columns: {}", columns.join(", "))]
    RankDeficient { columns: Vec<String> },

    #[error("insufficient observations: {0}")]
    InsufficientData(String),

    #[error("solver did not converge after {iterations} iterations (final loss {loss})")]
    NonConvergence { iterations: usize, loss: f64 },

    #[error("matrix factorization failed: {0}")]
    Factorization(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for errors caused by bad inputs rather than failed computation.
    pub fn is_validation(&self) -> bool {
        if let Error::AtYear { source, .. } = self {
            return source.is_validation();
        }
        !matches!(
            self,
            Error::DegenerateEconomy { .. }
                | Error::RankDeficient { .. }
                | Error::NonConvergence { .. }
                | Error::Factorization(_)
        )
    }

    pub(crate) fn at_year(self, year: i32) -> Self {
        Error::AtYear {
            year,
            source: Box::new(self),
        }
    }

    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(format!("{name} = {value}")))
    }
}
