//! Two-mode Gaussian transducers: classification under local symplectic
//! operations, canonical forms, two-pass interference correction, loss
//! analysis for the beam-splitter transducer, and bosonic-code fidelities
//! under residual displacement noise.
//!
//! Quadratures are ordered `(q1, p1, q2, p2)` and every linear map acts on
//! column vectors of that form. Block `T_ij` of a [`TwoModeTransform`] maps
//! input mode `j` to output mode `i`.

pub mod classification;
pub mod codes;
pub mod diagonalization;
mod error;
pub mod interference;
pub mod lossy;
pub mod quadrature;
pub mod symplectic;

pub use classification::{classify, Classification, Subclass, TransducerClass};
pub use diagonalization::{diagonalize, diagonalize_constrained, ConstrainedForm, DiagonalForm};
pub use error::{Error, Result};
pub use symplectic::{Gate, QuadMatrix, Quadrature, TwoModeTransform};
