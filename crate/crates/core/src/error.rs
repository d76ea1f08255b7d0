use alloc::string::String;
use core::fmt;

/// Errors raised by the library.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    Domain(String),
    /// A pair in an explicit order violates `S <= S'  =>  S ⊆ S'`.
    OrderLaw(String),
    /// The relation is not antisymmetric.
    NotAntisymmetric(String),
    /// Table shapes or alphabets do not line up.
    Shape(String),
    /// A numeric evaluation referenced a symbol without a value.
    MissingSymbol(String),
    /// A set-function value is missing for a lattice member.
    MissingValue(String),
    /// A configured size cap would be exceeded.
    Resource(String),
    /// Input text could not be parsed.
    Parse(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::OrderLaw(m) => write!(f, "superposition-order law violated: {m}"),
            Error::NotAntisymmetric(m) => write!(f, "relation is not antisymmetric: {m}"),
            Error::Shape(m) => write!(f, "shape mismatch: {m}"),
            Error::MissingSymbol(m) => write!(f, "no value for entropy symbol {m}"),
            Error::MissingValue(m) => write!(f, "no value for lattice member {m}"),
            Error::Resource(m) => write!(f, "resource cap exceeded: {m}"),
            Error::Parse(m) => write!(f, "parse error: {m}"),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::Error::$kind(alloc::format!($($arg)*)))
    };
}
pub(crate) use bail;

impl core::error::Error for Error {}
