//! Engine errors that user-level data can trigger.
//!
//! Structural misuse (dimension or chart mismatches between values that the
//! caller constructed) panics instead; those are caller bugs, not data.

use thiserror::Error;

use crate::exactnum::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("map `{map}` is not adapted: coefficient {coefficient} of component {index} in the pulled-back boundary is not an integer")]
    NotAdapted {
        map: String,
        index: usize,
        coefficient: String,
    },

    #[error("map `{map}` carries nontrivial scalars; normalize before taking quotient data")]
    NontrivialScalars { map: String },

    #[error("form is not invariant: term {term} has weight {weight} under generator {generator}")]
    NotInvariant {
        term: String,
        generator: usize,
        weight: Rational,
    },

    #[error("descent obstruction at component {component}: pullbacks of {term} disagree")]
    GlueObstruction { component: String, term: String },

    #[error("diagram arrow {arrow} does not commute over the base: expected {expected}, got {got}")]
    ArrowMismatch {
        arrow: usize,
        expected: String,
        got: String,
    },

    #[error("restriction target object {object} has no matching composite in the source family")]
    MissingComposite { object: usize },

    #[error("family assigns no section to object {object}")]
    MissingSection { object: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
