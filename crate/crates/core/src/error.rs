use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unnormalizable: amplitude vector has norm {norm:e}")]
    Unnormalizable { norm: f64 },

    #[error("too few sites: need at least {min}, got {got}")]
    TooFewSites { min: usize, got: usize },

    #[error("site {site} out of range 1..={n_sites}")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("invalid block: {0}")]
    InvalidBlock(String),

    #[error("block size {block_size} out of range 0..={n_sites}")]
    BlockSizeOutOfRange { block_size: usize, n_sites: usize },

    #[error("enumeration too large: C({n_sites}, {block_size}) = {count} exceeds cap {cap}")]
    EnumerationTooLarge {
        n_sites: usize,
        block_size: usize,
        count: u128,
        cap: u128,
    },

    #[error("participation ratio {p} outside [1/{n_sites}, 1]")]
    ParticipationOutOfRange { p: f64, n_sites: usize },

    #[error("oracle size limit: {what} = {got} exceeds {max}")]
    OracleSizeLimit {
        what: &'static str,
        got: usize,
        max: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{n} is not a Fibonacci number (nearest: {below}, {above})")]
    NotFibonacci { n: usize, below: usize, above: usize },

    #[error("eigensolver did not converge: {0}")]
    SolverFailure(String),

    #[error("rk4 norm drift {drift:e} at t = {t}; use a smaller substep")]
    Rk4Unstable { drift: f64, t: f64 },

    #[error("invalid fit window: {0}")]
    FitWindow(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// True for errors caused by bad caller input rather than a numerical or
    /// I/O failure.
    pub fn is_usage(&self) -> bool {
        !matches!(
            self,
            Error::SolverFailure(_) | Error::Rk4Unstable { .. } | Error::Io(_)
        )
    }
}
