use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("characteristic {0} is not prime")]
    CompositeCharacteristic(u64),
    #[error("defining polynomial is reducible over F_{0}")]
    ReduciblePolynomial(u64),
    #[error("invalid field presentation: {0}")]
    InvalidField(String),
    #[error("field of size {0} is beyond the supported range")]
    FieldTooLarge(u128),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different fields")]
    MixedFields,
    #[error("element has no square root")]
    NoSquareRoot,
    #[error("operation requires characteristic 2")]
    OddCharacteristic,
    #[error("operation requires odd characteristic")]
    EvenCharacteristic,
    #[error("interpolation nodes are not distinct")]
    DuplicateNodes,
    #[error("extension F_(q^{0}) is too large to count")]
    ExtensionTooLarge(u32),
    #[error("unsupported curve shape: {0}")]
    UnsupportedShape(String),
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("zero function")]
    ZeroFunction,
    #[error("points lie on different curves")]
    MixedCurves,
    #[error("a coset of mE admits no representative outside the excluded torsion")]
    EmptyCosetUnderConstraint,
    #[error("point counts do not come from a curve of the stated genus: {0}")]
    NonIntegralResult(String),
    #[error("permutation group is not transitive")]
    NotTransitive,
    #[error("permutation group exceeds {0} elements")]
    GroupTooLarge(usize),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("unknown family: {0}")]
    UnknownFamily(String),
    #[error("candidate budget of {0} exceeded")]
    BudgetExceeded(u64),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("fixture {id}: {message}")]
    Validation { id: String, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
