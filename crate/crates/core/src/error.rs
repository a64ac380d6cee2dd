use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("query vector has zero norm")]
    DegenerateQuery,

    #[error("no training data: no asserted entity has an embedding")]
    NoTrainingData,

    #[error("too few points: {found} usable rows, at least {required} required")]
    TooFewPoints { found: usize, required: usize },

    #[error("non-finite value during optimization at iteration {iteration}")]
    NonFinite { iteration: usize },

    #[error("type vector for {type_iri} is not unit norm (norm {norm})")]
    NotUnitNorm {
        type_iri: alloc::string::String,
        norm: f64,
    },

    #[error("duplicate type {0}")]
    DuplicateType(alloc::string::String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}
