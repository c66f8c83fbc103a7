//! Numerical verification engine for weak metric f-structures.

pub mod connection;
pub mod error;
pub mod examples;
pub mod fields;
pub mod jet;
pub mod sampling;
pub mod checks;
pub mod structure;
pub mod suite;

pub use error::{Error, Result};
