use thiserror::Error;

use crate::arm::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("invalid kernel: violates {}", join(.0))]
    InvalidKernel(Vec<Violation>),

    #[error("contract violation: {0}")]
    Contract(String),

    /// `V^p - V^a` has the same sign at both ends of the largest bracket.
    #[error("no indifference point for subsidy in [{lo}, {hi}] (diff {diff_lo:.3e} .. {diff_hi:.3e})")]
    NoCrossing {
        lo: f64,
        hi: f64,
        diff_lo: f64,
        diff_hi: f64,
    },

    #[error("index did not converge by horizon {horizon}: last iterates {previous} and {last}")]
    NonConvergence {
        horizon: usize,
        previous: f64,
        last: f64,
    },

    #[error("invalid availability window: arrival {arrive} must be in 1..{depart}")]
    InvalidWindow { arrive: usize, depart: usize },

    #[error("intervention benefit undefined: reference reward equals do-nothing reward ({0})")]
    UndefinedBenefit(f64),

    #[error("could not sample a {class} kernel within {attempts} attempts")]
    GenerationExhausted { class: String, attempts: usize },

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("line {line}: {}", join(violations))]
    RowInvalid { line: u64, violations: Vec<Violation> },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by bad user input rather than a failed run.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::MalformedInput(_)
                | Error::InvalidKernel(_)
                | Error::Parse { .. }
                | Error::RowInvalid { .. }
                | Error::Config(_)
                | Error::InvalidWindow { .. }
        )
    }
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

pub type Result<T> = std::result::Result<T, Error>;
