use thiserror::Error;

/// Errors raised by the exact-arithmetic kernels.
///
/// Several variants are signals rather than failures (`NotUnit`,
/// `NoStabilization`, `PrecisionExhausted`); callers match on them.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("{pointer}: {msg}")]
    Schema { pointer: String, msg: String },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus is not irreducible over F_{0}")]
    ReducibleModulus(u64),
    #[error("result too large: {0}")]
    TooLarge(String),

    #[error("not a Weil polynomial: {0}")]
    BadWeil(String),
    #[error("Weil polynomial is not ordinary at p")]
    NotOrdinary,
    #[error("unit-root part is inseparable mod p")]
    InseparableUnitPart,
    #[error("root of unity of order {0} is not available in this context")]
    LevelMismatch(u64),
    #[error("element is not a unit")]
    NotUnit,
    #[error("character value is not a unit")]
    NotUnitValue,
    #[error("values come from different contexts")]
    ContextMismatch,
    #[error("precision p^k does not fit the word size")]
    PrecisionTooLarge,

    #[error("bad surjection: {0}")]
    BadSurjection(String),
    #[error("character is not a homomorphism: {0}")]
    NotHomomorphism(String),

    #[error("place {0} lies in the ramification set")]
    PlaceInS(String),
    #[error("no Frobenius entry for place {0}")]
    TableMiss(String),

    #[error("S and T overlap")]
    SetsOverlap,
    #[error("auxiliary set T must be non-empty")]
    EmptyT,
    #[error("series did not stabilize below the degree cap {0}")]
    NoStabilization(usize),
    #[error("character is not primitive or is trivial")]
    NotPrimitive,
    #[error("a square root of q is needed")]
    SqrtNeeded,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("coefficients are not fixed by the residue Frobenius")]
    NotGaloisStable,
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("mu-invariant cannot be extracted at these caps")]
    MuAmbiguous,
    #[error("no unit coefficient below the T-degree cap")]
    LambdaAmbiguous,
    #[error("zero input")]
    ZeroInput,

    #[error("module is not annihilated by the model polynomial")]
    NotModelModule,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn schema(pointer: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Schema { pointer: pointer.into(), msg: msg.into() }
    }

    /// Prefixes the JSON pointer of an input error with `pointer`.
    pub fn at(self, pointer: &str) -> Self {
        match self {
            Error::InvalidInput(msg) => Error::Schema { pointer: pointer.into(), msg },
            Error::Schema { pointer: inner, msg } => Error::Schema { pointer: format!("{pointer}{inner}"), msg },
            other => other,
        }
    }
}
