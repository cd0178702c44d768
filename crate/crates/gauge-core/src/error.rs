use alloc::string::String;
use core::fmt;

/// Error type shared by all modules of the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument was outside the mathematical domain of an operation
    /// (e.g. β ≤ 0 for a heat kernel, t < 1 for a Hida norm).
    Domain(String),
    /// A series could not be truncated within the configured term cap.
    Truncation { needed: usize, cap: usize },
    /// The degenerate-invariant guard of the octet parametrization fired.
    DegenerateOctet { n: usize, value: f64 },
    /// A lattice operation was asked to relate two incompatible levels.
    NotAnAncestor(String),
    /// A plaquette was refined twice, or is absent from its lattice.
    InvalidPlaquette(String),
    /// A commutant spectrum too close to the rank threshold to classify.
    IndeterminateCommutant { singular_value: f64, threshold: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Truncation { needed, cap } => {
                write!(f, "series needs {needed} terms, cap is {cap}")
            }
            Error::DegenerateOctet { n, value } => write!(
                f,
                "degenerate octet invariants: |3·phi_{n}^2 - I2| = {value:e}"
            ),
            Error::NotAnAncestor(msg) => write!(f, "not an ancestor lattice: {msg}"),
            Error::InvalidPlaquette(msg) => write!(f, "invalid plaquette: {msg}"),
            Error::IndeterminateCommutant {
                singular_value,
                threshold,
            } => write!(
                f,
                "commutant rank indeterminate: singular value {singular_value:e} within 10x of threshold {threshold:e}"
            ),
        }
    }
}
