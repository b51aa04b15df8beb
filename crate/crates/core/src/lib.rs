//! Exact computations for the principally graded Wakimoto module of affine sl2.
//!
//! The crate realizes the level-`k` representation on three free-boson Fock
//! spaces, checks the defining relations, finds singular and cosingular
//! vectors, factors the determinant of the PBW-to-Fock matrix, applies the
//! single screening charge and compares BRST Euler characters with the
//! BGG alternating sum. Every number is an exact rational.

pub mod brst;
pub mod currents;
pub mod error;
pub mod exact;
pub mod fock;
pub mod structure;

pub use error::{Error, Result};
pub use exact::{format_rat, int, parse_rat, rat, Rat};

/// Engine version recorded alongside every result.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
