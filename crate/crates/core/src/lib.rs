//! Infinite tensor products of normalized vectors: overlaps, sectors,
//! product operators and measurement chains.

pub mod analogues;
pub mod chain;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod operators;
pub mod product;
pub mod sectors;
pub mod spinchain;
pub mod superposition;

pub use error::{Error, Result};
