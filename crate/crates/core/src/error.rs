use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("non-positive frequency: omega = {omega}, Omega = {splitting}")]
    NonPositiveFrequency { omega: f64, splitting: f64 },

    #[error("spectrum unbounded below: |(1+chi) g2| = {g2_tilde} must stay below g_t = {g_t}")]
    UnboundedSpectrum { g2_tilde: f64, g_t: f64 },

    #[error("truncation N = {0} is too small (need N >= 2)")]
    TruncationTooSmall(usize),

    #[error("eigensolver did not converge after {matvecs} operator applications (residual {residual:e})")]
    NoConvergence { matvecs: usize, residual: f64 },

    #[error("truncation would exceed the ceiling of {cap} Fock states per spin")]
    TruncationCeiling { cap: usize },

    #[error("ground state is quasi-degenerate (gap {gap:e}); observables depend on the basis choice")]
    DegenerateAmbiguity { gap: f64 },

    #[error("Hermite recurrence cannot evaluate level {level}: {reason}")]
    OverflowGuard { level: usize, reason: &'static str },

    #[error("displacement {displacement} lies outside the sampled range [{xmin}, {xmax}]")]
    RangeTooNarrow { displacement: f64, xmin: f64, xmax: f64 },

    #[error("no competing minima anywhere in the bracket [{lo}, {hi}]")]
    NoCompetition { lo: f64, hi: f64 },

    #[error("root not found: {0}")]
    NotFound(String),

    #[error("outside the domain of the formula: {0}")]
    DomainError(String),

    #[error("the g1 form of the low-frequency boundary is singular at g2 = 0")]
    DivisionByZeroG2,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
