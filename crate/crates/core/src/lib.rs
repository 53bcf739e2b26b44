//! Hyperbolic circle patterns with prescribed intersection angles on closed surfaces of genus > 1.

pub mod complex;
pub mod conditions;
pub mod document;
pub mod error;
pub mod geometry;
pub mod layout;
pub mod samples;
pub mod selfcheck;
pub mod solver;

pub use error::{Error, ErrorClass, Result};
