use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A key did not have the length the construction requires.
    InvalidKeyLength { expected: usize, actual: usize },
    /// Sponge rate outside the supported set.
    InvalidRate(usize),
    /// Any other out-of-contract argument.
    InvalidParameter(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidKeyLength { expected, actual } => {
                write!(f, "invalid key length: expected {expected} bytes, got {actual}")
            }
            Error::InvalidRate(r) => write!(f, "invalid sponge rate {r} (expected 168 or 136)"),
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
