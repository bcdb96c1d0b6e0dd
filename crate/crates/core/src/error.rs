use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The requested quantity only exists for omega > 2.
    #[error("omega = {omega} is not in the pure-point regime (omega > 2 required)")]
    NotPurePoint { omega: f64 },

    #[error("degenerate denominator in the exponent of the first kind (gamma = {gamma})")]
    DegenerateDenominator { gamma: String },

    /// A continued-fraction level evaluated to an (almost) vanishing denominator.
    #[error("continued fraction hits a pole at E = {energy} (level {level})")]
    ContinuedFractionPole { energy: f64, level: usize },

    #[error("{what} did not converge: {detail}")]
    NotConverged { what: &'static str, detail: String },

    /// Energy lies inside the exclusion window of a Bogoliubov-frame pole.
    #[error("E = {energy} is within the exclusion window of the pole E^({index})")]
    PoleProximity { energy: f64, index: usize },

    #[error("Chen's G-function degenerates at delta = 0; use the diagonalization oracle")]
    ZeroDelta,

    #[error("no sign change on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },
}
