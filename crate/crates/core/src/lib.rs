//! Continued fractions on the Heisenberg group.

pub mod bigfloat;
pub mod cf;
pub mod cli;
pub mod domain;
pub mod error;
pub mod field;
pub mod gaussian;
pub mod lab;
pub mod moebius;
pub mod siegel;

pub use error::{Error, Result};
