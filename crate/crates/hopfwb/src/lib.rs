//! Workbench for graded quotients of the free semigroup with adjoined zero
//! and the Hopf structure of the associated operator algebras.
//!
//! The pipeline: a [`presentation::Presentation`] generates a homogeneous
//! congruence, [`congruence::ClassTable`] computes the graded quotient
//! semigroup, [`algebra`] does exact polynomial arithmetic over its nonzero
//! classes, [`fock`] realizes everything as truncated matrices on the
//! weighted representation space and on the full Fock space, and the
//! remaining modules verify the comultiplication, convolution predual,
//! automorphism, and Schur-multiplier structure both exactly and numerically.

pub mod algebra;
pub mod aut;
pub mod congruence;
pub mod error;
pub mod fock;
pub mod hopf;
pub mod linalg_exact;
pub mod predual;
pub mod presentation;
pub mod scalar;
pub mod schur;
pub mod verify;
pub mod word;

pub use error::{Error, Result};
