use rug::Integer;
use thiserror::Error;

/// Everything that can go wrong, grouped by how the CLI reports it.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input. CLI exit code 2.
    #[error("{0}")]
    Validation(String),

    /// A reduction-data file that parses but violates an invariant. CLI exit code 2.
    #[error("reduction data: {0}")]
    ReductionData(String),

    /// A reducible or non-regular fibre was met and no usable data was supplied. CLI exit code 2.
    #[error("prime {prime}: {reason}; supply a reduction-data file for this prime")]
    MissingReductionData { prime: Integer, reason: String },

    /// Integer factorization gave up before finishing. CLI exit code 3.
    #[error("factorization budget exhausted: found {found:?}, composite cofactor {cofactor}")]
    FactorizationBudget {
        found: Vec<(Integer, u32)>,
        cofactor: Integer,
    },

    /// p-adic precision too small to separate factors. CLI exit code 3.
    #[error("p-adic precision {digits} insufficient at p = {prime}; raise the precision")]
    PadicPrecision { prime: Integer, digits: u32 },

    /// Floating-point trouble: near-zero theta values, clustered branch points,
    /// non-converging quadrature. CLI exit code 3.
    #[error("numerical degeneracy: {0}")]
    Numerical(String),

    /// A theta value fell below the relative threshold; resampling the
    /// auxiliary points usually cures it. CLI exit code 3.
    #[error("theta value near zero (relative size 1e{log10_relative:.1})")]
    ThetaNearZero { log10_relative: f64 },

    /// Any of the above, tagged with the pipeline step that raised it.
    #[error("{step}: {source}")]
    InStep { step: &'static str, source: Box<Error> },
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) | Error::ReductionData(_) | Error::MissingReductionData { .. } => 2,
            Error::FactorizationBudget { .. } | Error::PadicPrecision { .. } | Error::Numerical(_)
            | Error::ThetaNearZero { .. } => 3,
            Error::InStep { source, .. } => source.exit_code(),
        }
    }

    /// Innermost error, with step tags removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::InStep { source, .. } => source.root(),
            e => e,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Tags errors with the name of the step that produced them.
pub(crate) trait StepContext<T> {
    fn step(self, name: &'static str) -> Result<T>;
}

impl<T> StepContext<T> for Result<T> {
    fn step(self, name: &'static str) -> Result<T> {
        self.map_err(|e| Error::InStep { step: name, source: Box::new(e) })
    }
}
