//! Exact Hurwitz continued fractions over the Gaussian integers.

pub mod algebraic;
pub mod discrepancy;
pub mod enumeration;
pub mod error;
pub mod expansion;
pub mod gaussian;
pub mod geometry;
pub mod interval;
pub mod oracle;
pub mod search;
pub mod verify;
pub mod word;

pub use error::{Error, Result};
pub use gaussian::{GaussianInt, GaussianRational};
