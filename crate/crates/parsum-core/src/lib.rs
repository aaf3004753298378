//! Parallel sums of positive objects, computed several independent ways and
//! cross-validated.
//!
//! The parallel sum `A : B` of two positive semidefinite operators is the
//! positive operator whose quadratic form is the infimal convolution of the
//! quadratic forms of `A` and `B` (the operator analogue of combining
//! resistors in parallel). This crate realizes it at desk scale, in four
//! settings that share one projection mechanism through auxiliary
//! Gram-metric spaces:
//!
//! * [`operator`] — PSD matrices on `C^n`, with five independent
//!   factorization routes cross-checked against the pseudo-inverse formula
//!   `A (A + B)^+ B`;
//! * [`form`] — possibly degenerate nonnegative Hermitian forms, through
//!   null-space quotients;
//! * [`antidual`] — positive operators from a space into its anti-dual, with
//!   the reflexivity identification kept explicit;
//! * [`algebra`] — representable positive functionals on finite-dimensional
//!   *-algebras, through the GNS construction, including the singularity
//!   characterization and the unital / approximate-unit bridge theorems.
//!
//! [`linalg`] holds the shared dense complex kernel and [`random`] the seeded
//! instance generators used by the verification suites.

pub mod algebra;
pub mod antidual;
pub mod error;
pub mod form;
pub mod linalg;
pub mod operator;
pub mod random;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, GramSpace, Tolerance};
