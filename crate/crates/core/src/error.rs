use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown species {0:?}")]
    UnknownSpecies(String),
    #[error("unknown reaction {0:?}")]
    UnknownReaction(String),
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("invalid reaction {id:?}: {reason}")]
    InvalidReaction { id: String, reason: String },
    #[error("stoichiometric coefficient {coefficient} of {species:?} in {reaction:?} exceeds |nu| <= {max}")]
    CoefficientTooLarge { reaction: String, species: String, coefficient: i64, max: i64 },
    #[error("invalid bounds: lower {lower} > upper {upper}")]
    InvalidBounds { lower: u64, upper: u64 },
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("missing penalty strength for {0}")]
    MissingPenalty(String),
    #[error("negative penalty strength for {0}")]
    NegativePenalty(String),
    #[error("arithmetic overflow in exact coefficients")]
    Overflow,
    #[error("search space of {size} pathways exceeds the limit {limit}")]
    SearchSpaceTooLarge { size: u128, limit: u128 },
    #[error("no feasible pathway exists")]
    NoFeasiblePathway,
    #[error("target {0:?} is marked purchasable")]
    PurchasableTarget(String),
    #[error("problem has no outflow reaction with a positive lower bound")]
    NoTargets,
    #[error("benchmark generation failed after {attempts} attempts: {reason}")]
    GenerationFailed { attempts: usize, reason: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
