//! Number-theoretic point sets with exact arithmetic: visible lattice
//! points, B-free lattice sets and k-free quadratic integers, plus the
//! machinery to check admissibility, locate patterns, and recover the
//! GL(2,Z) stabiliser of each set at finite scale.

pub mod analytics;
pub mod admissibility;
pub mod error;
pub mod lattice;
pub mod render;
pub mod ring;
pub mod sieve;
pub mod symmetry;

pub use error::{Error, Result};
