use thiserror::Error;

/// Errors raised by the series, cumulant, transform and model layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("alphabet mismatch: {left} vs {right} variables")]
    AlphabetMismatch { left: usize, right: usize },

    #[error("letter {letter} outside alphabet 1..={d}")]
    LetterOutOfRange { letter: usize, d: usize },

    #[error("word of degree {degree} exceeds truncation degree {order}")]
    DegreeTooLarge { degree: usize, order: usize },

    #[error("alphabet size must be positive")]
    EmptyAlphabet,

    #[error("series has zero constant term and cannot be inverted")]
    ZeroConstantTerm,

    #[error("substituent {index} has nonzero constant term")]
    NonzeroConstantTerm { index: usize },

    #[error("expected {expected} substituents, got {got}")]
    SubstitutionArity { expected: usize, got: usize },

    #[error("functional must have empty-word moment 1")]
    NotUnital,

    #[error("cumulant series must have zero constant term")]
    CumulantConstantTerm,

    #[error("partition is not non-crossing")]
    Crossing,

    #[error("partitions live on different ground sets ({left} vs {right})")]
    GroundSetMismatch { left: usize, right: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("n = {n} exceeds the enumeration cap {cap}")]
    EnumerationCap { n: usize, cap: usize },

    #[error("parameter t = -1 is outside the domain of the B-map")]
    TimeMinusOne,

    #[error("operation requires a single variable, got d = {d}")]
    SingleVariableOnly { d: usize },

    #[error("covariance of the first argument is singular; psi undetermined at degree {degree}")]
    Underdetermined { degree: usize },

    #[error("phi is not in the image of Phi[rho, .]: mismatch at degree {degree}")]
    NotInImage { degree: usize },

    #[error("insufficient Jacobi parameters for degree {order}")]
    InsufficientJacobi { order: usize },

    #[error("level {level} requires truncation degree at least {needed}, have {order}")]
    LevelTooDeep { level: usize, needed: usize, order: usize },

    #[error("functional is not positive semidefinite at level {level}")]
    NotPositive { level: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("Fock depth {depth} is below the moment degree {order}")]
    DepthTooSmall { depth: usize, order: usize },

    #[error("model dimension {dim} exceeds the configured bound {bound}")]
    DimensionBound { dim: usize, bound: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
