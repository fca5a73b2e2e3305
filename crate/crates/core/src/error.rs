use thiserror::Error;

/// Errors raised by the library. Every variant has a stable machine-readable
/// code, see [`Error::code`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("operands belong to different groups: {0} vs {1}")]
    MixedGroups(String, String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("matrix is rank deficient: {0}")]
    RankDeficient(String),
    #[error("handle reduction exceeded {0} steps")]
    HandleReductionCap(usize),
    #[error("anchor element is the identity")]
    AnchorIsIdentity,
    #[error("element {0} is not bracketed by powers of the anchor within exponent cap {1}")]
    NotBracketedWithinCap(String, u64),
    #[error("anchor is not cofinal: {0}")]
    NotCofinal(String),
    #[error("anchor pairing {0} is irrational; stable values would leave the constant field")]
    IrrationalAnchorPairing(String),
    #[error("membership could not be decided within the search cap: {0}")]
    MembershipUnknown(String),
    #[error("certified interval straddles an integer: {0}")]
    IntervalUndecided(String),
    #[error("tau does not evaluate to 1 on the anchor (got {0})")]
    TauNotNormalized(String),
    #[error("ordering is not right-invariant under the anchor: {0}")]
    NotInvariant(String),
    #[error("invariant violated: {0}")]
    InvariantViolated(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse(_) => "ParseError",
            Error::MixedGroups(..) => "MixedGroups",
            Error::DivisionByZero => "DivisionByZero",
            Error::InvalidInput(_) => "InvalidInput",
            Error::RankDeficient(_) => "RankDeficient",
            Error::HandleReductionCap(_) => "HandleReductionCap",
            Error::AnchorIsIdentity => "AnchorIsIdentity",
            Error::NotBracketedWithinCap(..) => "NotBracketedWithinCap",
            Error::NotCofinal(_) => "NotCofinal",
            Error::IrrationalAnchorPairing(_) => "IrrationalAnchorPairing",
            Error::MembershipUnknown(_) => "MembershipUnknown",
            Error::IntervalUndecided(_) => "IntervalUndecided",
            Error::TauNotNormalized(_) => "TauNotNormalized",
            Error::NotInvariant(_) => "NotInvariant",
            Error::InvariantViolated(_) => "InvariantViolated",
        }
    }

    /// Errors that mean "a search cap was hit or an answer could not be
    /// certified", as opposed to malformed input.
    pub fn is_undecided(&self) -> bool {
        matches!(
            self,
            Error::HandleReductionCap(_)
                | Error::NotBracketedWithinCap(..)
                | Error::MembershipUnknown(_)
                | Error::IntervalUndecided(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
