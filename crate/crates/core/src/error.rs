use thiserror::Error;

/// Everything that can go wrong while building or checking the algebraic objects
/// of this crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("a boundary vector lies outside the span of the cycles")]
    ContainmentViolation,
    #[error("truncation mismatch: source max degree {source_max}, target max degree {target_max}")]
    TruncationMismatch { source_max: usize, target_max: usize },
    #[error("not a chain complex: d^2 != 0 starting from degree {degree}")]
    NotAComplex { degree: usize },
    #[error("not a chain map at degree {degree}")]
    NotAChainMap { degree: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("scalar must be nonzero")]
    InvalidScalar,
    #[error("operad has a nonzero differential in arity {arity}")]
    NonZeroDifferential { arity: usize },
    #[error("invalid multiplicative structure: {0}")]
    InvalidMultiplicativeStructure(String),
    #[error("invalid operad: {0}")]
    InvalidOperad(String),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("formality witness endpoint does not match the homology operad: {0}")]
    EndpointMismatch(String),
    #[error("square {square} does not commute (arity {arity}, basis element {basis})")]
    NonCommutingSquare { square: usize, arity: usize, basis: usize },
    #[error("arrow {arrow} is not a weak equivalence (arity {arity}, degree {degree})")]
    NotWeakEquivalence { arrow: usize, arity: usize, degree: usize },
    #[error("tree sum is not finite without an explicit vertex bound")]
    NonFinite,
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("expression is not multilinear: {0}")]
    NonMultilinear(String),
    #[error("composition position {position} out of range for arity {arity}")]
    IndexOutOfRange { position: usize, arity: usize },
    #[error("cosimplicial identity {identity} fails at cosimplicial degree {degree}")]
    CosimplicialIdentityFailure { identity: String, degree: usize },
    #[error("requested window is not certified: {0}")]
    WindowNotCertified(String),
    #[error("cochains live over different operads")]
    HostMismatch,
    #[error("bicomplex invariant violated: {0}")]
    InvariantViolation(String),
    #[error("not a map of cosimplicial complexes: {0}")]
    NotCosimplicialMap(String),
    #[error("column map is not a quasi-isomorphism at cosimplicial degree {column}, internal degree {degree}")]
    ColumnNotQuasiIso { column: usize, degree: usize },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
