use alloc::string::String;
use core::fmt;

/// Errors reported by the reconstruction library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Shapes of the operands do not agree.
    Dimension(String),
    /// An argument is outside its allowed range.
    Usage(String),
    /// Input data is unusable (non-finite values, zero band means, ...).
    Data(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension(msg) => write!(f, "dimension error: {msg}"),
            Error::Usage(msg) => write!(f, "usage error: {msg}"),
            Error::Data(msg) => write!(f, "data error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! dim_err {
    ($($arg:tt)*) => { $crate::error::Error::Dimension(alloc::format!($($arg)*)) };
}
macro_rules! usage_err {
    ($($arg:tt)*) => { $crate::error::Error::Usage(alloc::format!($($arg)*)) };
}
macro_rules! data_err {
    ($($arg:tt)*) => { $crate::error::Error::Data(alloc::format!($($arg)*)) };
}
pub(crate) use {data_err, dim_err, usage_err};
