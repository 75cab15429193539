use alloc::string::String;

/// Errors raised by the library. The CLI maps every variant to exit status 2.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("layout error: {0}")]
    Layout(String),
    #[error("capability error: {0}")]
    Capability(String),
    #[error("max-entropy solver did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! input_err {
    ($($arg:tt)*) => { $crate::error::Error::Input(alloc::format!($($arg)*)) };
}
macro_rules! layout_err {
    ($($arg:tt)*) => { $crate::error::Error::Layout(alloc::format!($($arg)*)) };
}
macro_rules! capability_err {
    ($($arg:tt)*) => { $crate::error::Error::Capability(alloc::format!($($arg)*)) };
}
pub(crate) use capability_err;
pub(crate) use input_err;
pub(crate) use layout_err;
