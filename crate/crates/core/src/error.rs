use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("domain mismatch: expected {expected} points, found {found}")]
    DomainMismatch { expected: usize, found: usize },

    #[error("not a permutation: {0}")]
    NotAPermutation(String),

    #[error("unknown atom `{0}`")]
    UnknownAtom(String),

    #[error("duplicate atom label `{0}`")]
    DuplicateAtom(String),

    #[error("group closure exceeds the cap of {cap} elements")]
    GroupTooLarge { cap: usize },

    #[error("enumeration cap exceeded: {0}")]
    CapExceeded(String),

    #[error("subgroup is not contained in the ambient group")]
    NotASubgroup,

    #[error("family does not match the group: {0}")]
    FamilyMismatch(String),

    #[error("arity {arity} is out of range (cap {cap})")]
    ArityOutOfRange { arity: usize, cap: usize },

    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("predicate variable A{index}#{arity} applied to {found} arguments")]
    ArityClash { index: u32, arity: u32, found: usize },

    #[error("free variable `{0}` is not assigned")]
    Unassigned(String),

    #[error("assigned value for `{0}` is not a member of the structure")]
    NotAMember(String),

    #[error("variables to abstract must be distinct")]
    DuplicateVariables,

    #[error("structure is not closed under the permutation: {0}")]
    ClosureViolation(String),

    #[error("operation needs a finite structure")]
    NeedsFinite,

    #[error("operation needs a symbolic structure")]
    NeedsSymbolic,

    #[error("group element rejected: {0}")]
    InvalidGroupElement(String),

    #[error("template does not apply to this sort: {0}")]
    TemplateMismatch(String),

    #[error("truncation {truncation} is too small; at least {needed} atoms are needed")]
    TruncationTooSmall { truncation: usize, needed: usize },

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
