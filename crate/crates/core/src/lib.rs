//! Exact-arithmetic engine for degenerating graded rings along families of
//! multiplicative filtrations.
//!
//! The library builds windows of the multi-index Rees construction attached to
//! a graded quotient ring and a list of filtration cutters, certifies degreewise
//! flatness of the window through homology of intersection complexes, extracts
//! the central fiber (the associated multi-graded ring) with exact basis data,
//! and cross-checks the combinatorial shadow (weight cones, valuation orders,
//! toric divisorial identities) against independent formulas.
//!
//! All arithmetic is exact over the rationals. Every computation is windowed:
//! results are certificates about the inspected degree range and multi-index
//! box, never extrapolations.

pub mod budget;
pub mod cone;
pub mod filtration;
pub mod gradedla;
pub mod groebner;
pub mod polycore;
pub mod rees;
pub mod toric;

pub use budget::Budget;
pub use filtration::{FiltrationFamily, MultiIndex, OrdValue, QuotientRing};
pub use gradedla::{DegreeSlice, Frame, GradedComplex, Space};
pub use groebner::{BasisCache, GroebnerBasis, Ideal};
pub use polycore::{Monomial, PolyRing, Polynomial, Rational, TermOrder, WeightVector};
pub use rees::{CentralFiber, FiberElement, FlatnessReport, IndexWindow, ReesWindow, SubspaceWindow};
pub use toric::{LatticeBox, ToricDivisor, ToricModel};

use thiserror::Error;

/// Structured failure for every fallible operation in the crate.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    /// Input text could not be parsed; position is 1-based.
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    /// A variable name is not declared in the ambient ring; position is 1-based.
    #[error("undeclared variable `{name}` at line {line}, column {col}")]
    UndeclaredVariable { name: String, line: usize, col: usize },
    /// Two objects live over different rings or frames.
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    /// A vector or matrix has the wrong dimensions (expected vs got).
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// An operation that requires homogeneous input received mixed degrees.
    #[error("not homogeneous: {0}")]
    NotHomogeneous(String),
    /// A precondition on the input data fails.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// The operation is undefined on the zero element.
    #[error("zero element: {0}")]
    ZeroElement(String),
    /// A subobject is not contained where the construction requires it.
    #[error("containment violation: {0}")]
    Containment(String),
    /// A requested index lies outside the computed window.
    #[error("outside window: {0}")]
    OutOfWindow(String),
    /// A configured resource budget was exhausted before completion.
    #[error("budget exceeded: {0}")]
    Budget(String),
}

pub type Result<T> = std::result::Result<T, Error>;
