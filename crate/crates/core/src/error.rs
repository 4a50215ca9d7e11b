use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A constructor or operation received an invalid parameter.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The basis matrix is singular or badly conditioned.
    #[error("singular basis: {0}")]
    SingularBasis(String),

    /// A lattice enumeration or grid would exceed its configured size cap.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// An adaptive quadrature or iterative method failed to converge.
    #[error("no convergence: {0}")]
    NoConvergence(String),

    /// A lattice sum diverges for the requested potential.
    #[error("divergent sum: {0}")]
    Divergence(String),

    /// Malformed descriptor or report file.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// `true` for errors coming from numerical failure rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoConvergence(_) | Error::Resource(_))
    }
}
