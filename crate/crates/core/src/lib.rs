//! Separability of two-mode Gaussian states from their covariance matrices.
//!
//! The crate reduces a covariance matrix to its local standard form,
//! classifies it with the invariant separability inequalities, and computes
//! the closed-form squeezing parameters at which the P-representation
//! condition becomes equivalent to separability. Every closed form is paired
//! with an independent numeric check in [`oracle`].

pub mod cli;
pub mod covariance;
pub mod criteria;
pub mod duan;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod squeezing;
pub mod verify;

pub use covariance::{CovarianceMatrix, LocalSymplectic, SqueezeParams, StandardForm};
pub use criteria::{Classification, RayQuery, Verdict};
pub use error::{Error, Result};
