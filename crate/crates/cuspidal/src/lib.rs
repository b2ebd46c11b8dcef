//! Exact computation of the rational cuspidal divisor class group of the
//! modular curve X₀(N).

pub mod cusps;
pub mod divisors;
pub mod error;
pub mod etalinalg;
pub mod generators;
pub mod intarith;
pub mod lattice;
pub mod orderengine;
pub mod structure;

pub use error::{Error, Result};
