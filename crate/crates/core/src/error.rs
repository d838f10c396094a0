use alloc::string::String;

/// Every failure the core can report.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operation needs a second operand")]
    MissingOperand,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("modulus {modulus:#b} is not an irreducible polynomial of degree {k}")]
    NotIrreducible { k: u32, modulus: u32 },
    #[error("unsupported extension degree {0}")]
    UnsupportedDegree(u32),
    #[error("the zero vector is not a projective point")]
    ZeroVector,
    #[error("bad dimension {0}")]
    BadDimension(usize),
    #[error("form type does not match the parity of n = {0}")]
    ParityMismatch(usize),
    #[error("base symplectic form is degenerate")]
    DegenerateBase,
    #[error("family parameter must be nonzero")]
    ZeroParameter,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("hub and bound do not form a flag of gap 2")]
    BadFlag,
    #[error("operation is undefined in a symplectic geometry")]
    Symplectic,
    #[error("morphism is not total on the source carriers")]
    PartialMap,
    #[error("unknown label {0}")]
    UnknownLabel(String),
    #[error("the given vertices and sides do not form a triangle")]
    NotATriangle,
    #[error("point is not on the selfconjugate hyperplane")]
    NotOnHorizon,
    #[error("lines are not concurrent")]
    NotConcurrent,
    #[error("pencil is empty")]
    EmptyPencil,
    #[error("field too small: need at least two distinct nonzero scalars")]
    FieldTooSmall,
    #[error("wrong case for this construction: {0}")]
    WrongCase(&'static str),
    #[error("unknown check {0}")]
    UnknownCheck(String),
    #[error("geometry not admissible for {id}: {reason}")]
    InadmissibleGeometry { id: String, reason: String },
    #[error("regularity criteria disagree on {0}")]
    CriterionDrift(String),
    #[error("structure has unexpected shape: {0}")]
    Malformed(String),
}

pub type Result<T> = core::result::Result<T, Error>;
