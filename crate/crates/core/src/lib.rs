//! Numerical toolkit for a first-order wave equation of a massive spin-1
//! particle, `i ∂Ψ/∂t = (a·p + m b) Ψ` with the transversality constraints
//! `div u = div v = 0`, and its minimal coupling to external fields.

pub mod algebra;
pub mod chain;
pub mod dynamics;
pub mod fields;
pub mod em;
pub mod error;
pub mod report;

pub use error::{Error, Result};
