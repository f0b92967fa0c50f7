use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid covariance matrix: {0}")]
    InvalidCovariance(String),

    #[error("local blocks are not positive (det A = {det_a}, det B = {det_b})")]
    NonPhysicalBlocks { det_a: f64, det_b: f64 },

    #[error("local invariants are inconsistent with a covariance matrix: {0}")]
    InconsistentInvariants(String),

    #[error("unphysical parameters: {0}")]
    UnphysicalParams(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("root is not bracketed: f(1) = {f_lo}, f(upper) = {f_hi}")]
    NoRootBracket { f_lo: f64, f_hi: f64 },

    #[error("state is entangled; no separable squeezer exists")]
    EntangledInput,
}

pub type Result<T> = std::result::Result<T, Error>;
