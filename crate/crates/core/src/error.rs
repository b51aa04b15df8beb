use thiserror::Error;

use crate::exact::Rat;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate interpolation: repeated sample point {0}")]
    DegenerateInterpolation(Rat),
    #[error("interpolation needs {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("no polynomial within the degree bound passes through the sample at {0}")]
    InconsistentSamples(Rat),
    #[error("incommensurate gradings: offsets {0} and {1} differ by a non-integer")]
    IncommensurateGradings(Rat, Rat),
    #[error("illegal mode: family {family} does not carry mode {n}")]
    IllegalMode { family: u8, n: i64 },
    #[error("no zero mode for beta")]
    NoBetaZeroMode,
    #[error("unreachable exponent {0}")]
    UnreachableExponent(Rat),
    #[error("Q1 not defined on this sector (j = {0})")]
    ScreeningUndefined(Rat),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("sector mismatch: {0}")]
    SectorMismatch(String),
    #[error("parameters outside the completely degenerate range: {0}")]
    NotDegenerate(String),
    #[error("rational root search failed: {0}")]
    RootSearch(String),
    #[error("character coefficient {coefficient} at degree {degree} is negative")]
    NegativeCharacter { degree: usize, coefficient: Rat },
    #[error("operator is not diagonalizable over the rationals on this subspace")]
    NotDiagonalizable,
}

pub type Result<T> = std::result::Result<T, Error>;
