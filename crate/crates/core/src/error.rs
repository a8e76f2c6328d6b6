use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter outside its domain: {0}")]
    ParameterDomain(String),

    #[error("interval bounds out of order: lower {lower} > upper {upper}")]
    Ordering { lower: f64, upper: f64 },

    #[error("truncation region ({lower}, {upper}] has zero probability")]
    DegenerateRegion { lower: f64, upper: f64 },

    #[error("probability {0} is on the boundary of the link domain (0, 1)")]
    Boundary(f64),

    #[error("latent value {value} for row {row} lies outside its censoring region")]
    Consistency { row: usize, value: f64 },

    #[error("structural mismatch: {0}")]
    Structure(String),

    #[error("could not find a starting point with finite posterior after {attempts} attempts")]
    Initialization { attempts: usize },

    #[error("non-finite proposal in chain {chain} at sweep {sweep} (component `{component}`)")]
    Numeric {
        chain: usize,
        sweep: usize,
        component: String,
    },

    #[error("invalid data: {0}")]
    Data(String),

    #[error("optimism needs two independent runs of the same model, got {0}")]
    InsufficientReplication(usize),

    #[error("reports are not comparable: {0}")]
    Comparability(String),

    #[error("model selection rejects dinterval-style deviance traces")]
    MonitoredDeviance,

    #[error("plug-in deviance at the posterior mean is not finite: {0}")]
    PlugIn(String),

    #[error("cannot estimate a density from a zero-variance trace")]
    DegenerateDensity,

    #[error("{}:{line}: column `{column}`: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        column: String,
        message: String,
    },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("config: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Io { .. } => 4,
            Error::Initialization { .. }
            | Error::Numeric { .. }
            | Error::PlugIn(_)
            | Error::DegenerateDensity
            | Error::DegenerateRegion { .. } => 3,
            _ => 2,
        }
    }
}
