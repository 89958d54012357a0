use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument fell outside the domain of a closed-form function.
    Domain { op: &'static str, value: f64 },
    InvalidArgument(&'static str),
    /// Successive quadrature refinements kept disagreeing.
    NonConvergence { relative_change: f64 },
    /// Phase 1 of the MISO broadcast could not flood its bootstrap disk.
    BootstrapFailure { radius: f64, uninformed: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { op, value } => write!(f, "{op}: argument {value} outside domain"),
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::NonConvergence { relative_change } => {
                write!(f, "quadrature did not converge (relative change {relative_change:e})")
            }
            Error::BootstrapFailure { radius, uninformed } => write!(
                f,
                "bootstrap flood left {uninformed} nodes uninformed inside radius {radius}"
            ),
        }
    }
}

impl core::error::Error for Error {}
