use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a supported prime (need a prime <= 97)")]
    UnsupportedPrime(u32),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {0} exceeds the supported maximum of {1}")]
    DimensionTooLarge(usize, usize),

    #[error("matrix is not invertible")]
    NotInvertible,

    #[error("group closure exceeded the cap of {0} elements")]
    SizeLimit(usize),

    #[error("element does not belong to the group")]
    NotInGroup,

    #[error("invalid symplectic space: {0}")]
    InvalidSymplecticSpace(String),

    #[error("matrix does not preserve the symplectic pairing")]
    NotSymplectic,

    #[error("matrix does not preserve the quadratic refinement")]
    NotOrthogonal,

    #[error("unsupported cochain degree {0}")]
    UnsupportedDegree(usize),

    #[error("cochain is not a cocycle")]
    NotACocycle,

    #[error("invalid group module: {0}")]
    InvalidModule(String),

    #[error("pairing is not equivariant for the supplied modules")]
    NotEquivariant,

    #[error("extension elements belong to different extensions")]
    MismatchedExtensions,

    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("invalid prime {0} for this operation: {1}")]
    InvalidModulus(u64, String),

    #[error("invalid cycle type: {0}")]
    InvalidCycleType(String),

    #[error("invalid local datum: {0}")]
    InvalidLocalDatum(String),

    #[error("not computable from a closed form: {0}")]
    NotComputable(String),

    #[error("invalid Markov data: {0}")]
    InvalidMarkov(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("schema violation at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
