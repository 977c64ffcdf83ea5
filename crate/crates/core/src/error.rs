use thiserror::Error;

use crate::instance::{ManId, PersonId, WomanId};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A person appears on the same side twice.
    #[error("duplicate person {0}")]
    DuplicatePerson(PersonId),

    #[error("unknown person {0}")]
    UnknownPerson(PersonId),

    /// A preference list does not cover the whole opposite side.
    #[error("preference list of {person} is incomplete (expected {expected} entries, found {found})")]
    IncompleteList {
        person: PersonId,
        expected: usize,
        found: usize,
    },

    /// The same person is ranked twice in one list.
    #[error("preference list of {person} ranks {entry} more than once")]
    DuplicateRank { person: PersonId, entry: PersonId },

    /// A person appears in more than one pair of a matching.
    #[error("person {0} appears in more than one pair")]
    MalformedMatching(PersonId),

    /// Preferences over persons present in both stages changed between stages.
    #[error("preferences of {person} over shared persons differ between stage {from} and stage {to}")]
    PreferenceDrift { person: PersonId, from: usize, to: usize },

    /// Rosters of consecutive stages do not nest as the variant requires.
    #[error("stage rosters violate the {variant} nesting: {detail}")]
    Nesting { variant: String, detail: String },

    #[error("operation requires variant {expected}, got {found}")]
    VariantMismatch { expected: String, found: String },

    #[error("enumeration cap of {cap} exceeded after {found} items")]
    CapExceeded { cap: usize, found: usize },

    #[error("matching is not stable: ({0}, {1}) blocks it")]
    NotStable(ManId, WomanId),

    /// The first matching does not men-dominate the second.
    #[error("men-dominance precondition violated at {0}")]
    NotDominating(ManId),

    #[error("problem is not regular: {0}")]
    NotRegular(String),

    /// A structural fact that holds for stable inputs was violated.
    #[error("structure violation: {0}")]
    StructureViolation(String),

    /// A guaranteed postcondition of a construction failed.
    #[error("postcondition violated: {0}")]
    PostconditionViolated(String),

    #[error("online algorithm emitted an unstable matching at stage {stage}")]
    ProtocolViolation { stage: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// University rosters or capacities differ between the two stages.
    #[error("college stages disagree: {0}")]
    CollegeMismatch(String),
}
