use thiserror::Error;

use crate::expr::ExprError;
use crate::jet::{DomainError, SeedError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Seed(#[from] SeedError),
    #[error("frame matrix is singular at this point (|det E| = {det:e})")]
    SingularFrame { det: f64 },
    #[error("metric is degenerate at this point (|det g| = {det:e})")]
    DegenerateMetric { det: f64 },
    #[error("plane is degenerate (|Gram determinant| = {gram:e})")]
    DegeneratePlane { gram: f64 },
    #[error("point lies outside the graph patch (square-root argument {arg:e})")]
    OutsidePatch { arg: f64 },
    #[error("eigendistribution D{sign} has rank {rank}, expected {expected}")]
    RankDefect {
        sign: char,
        rank: usize,
        expected: usize,
    },
    #[error("condition `{condition}` is only defined in dimension {required}, chart has {dim}")]
    WrongDimension {
        condition: &'static str,
        required: usize,
        dim: usize,
    },
    #[error("inconsistent verdicts: {0}")]
    InconsistentVerdict(String),
    #[error("invalid spec, `{location}`: {source}")]
    SpecExpr {
        location: String,
        #[source]
        source: ExprError,
    },
    #[error("invalid spec, block `{block}`: {message}")]
    Validation { block: String, message: String },
    #[error("sampling exhausted: accepted {accepted} of {wanted} points after {attempts} attempts ({last})")]
    SamplingExhausted {
        accepted: usize,
        wanted: usize,
        attempts: usize,
        last: String,
    },
    #[error("{0} was not computed for this point frame")]
    NotComputed(&'static str),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl From<DomainError> for Error {
    fn from(e: DomainError) -> Self {
        Error::Expr(ExprError::Domain(e))
    }
}

impl Error {
    /// Point-local failures that a sampler answers by drawing another point.
    pub fn is_resampleable(&self) -> bool {
        matches!(
            self,
            Error::SingularFrame { .. }
                | Error::DegenerateMetric { .. }
                | Error::OutsidePatch { .. }
                | Error::Expr(ExprError::Domain(_))
        )
    }

    pub fn validation(block: &str, message: impl Into<String>) -> Self {
        Error::Validation {
            block: block.to_string(),
            message: message.into(),
        }
    }
}
