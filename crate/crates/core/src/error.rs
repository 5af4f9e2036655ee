use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("grid of {grid} points cannot hold {modes} modes")]
    GridTooSmall { grid: usize, modes: usize },
    #[error("period {period} is below 2K = {required} for this profile")]
    PeriodTooShort { period: f64, required: f64 },
    #[error("budget exceeded: {what} needs {required}, limit {limit}")]
    Budget { what: &'static str, required: f64, limit: f64 },
    #[error("non-finite state at t = {t} (step {step}): blow-up at the truncated level")]
    BlowUp { t: f64, step: usize },
    #[error("no admissible delta above the floating-point floor: {0}")]
    InfeasibleAtPrecision(String),
    #[error("construction hypothesis fails: {0}")]
    Hypothesis(String),
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}
