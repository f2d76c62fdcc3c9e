//! Exact lattice computations for Enriques surface automorphism analysis.

pub mod borcherds;
pub mod cyclo;
pub mod error;
pub mod genus;
pub mod isom;
pub mod kneser;
pub mod lattice;
pub mod lll;
pub mod matrix;
pub mod permgroup;
pub mod phi;
pub mod vectors;
pub mod verifier;

pub use error::{Error, Result};
pub use lattice::{Lattice, Sublattice, TorsionQuadraticForm};
