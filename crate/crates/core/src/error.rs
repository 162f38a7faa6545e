use thiserror::Error;

use crate::report::ValidationReport;

pub type Result<T> = std::result::Result<T, CatError>;

#[derive(Debug, Error)]
pub enum CatError {
    #[error("unknown object `{0}`")]
    UnknownObject(String),

    #[error("unknown morphism `{0}`")]
    UnknownMorphism(String),

    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },

    #[error("category has {count} morphisms, above the limit of {limit} (set CATMN_MAX_MORPHISMS to raise it)")]
    TooLarge { count: usize, limit: usize },

    #[error("mismatch: {0}")]
    Mismatch(String),

    /// A constructor refused its input; the report says why.
    #[error("{context} failed validation:\n{report}")]
    Invalid {
        context: String,
        report: ValidationReport,
    },

    #[error("fiber over `{base}` has no designated {which}")]
    MissingExtremal { base: String, which: &'static str },

    #[error("lift of `{morphism}` to the fiber {which}s: expected exactly one, found {count}")]
    Lift {
        morphism: String,
        which: &'static str,
        count: usize,
    },

    #[error("invalid generator limits: {0}")]
    Limits(String),
}

impl CatError {
    pub(crate) fn invalid(context: impl Into<String>, report: ValidationReport) -> Self {
        CatError::Invalid {
            context: context.into(),
            report,
        }
    }
}
