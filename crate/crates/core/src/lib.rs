//! Numerical planar-algebra toolkit for singly generated subfactor planar
//! algebras whose 3-box space has dimension 14.
//!
//! The crate is layered bottom up:
//! [`scalar`] holds complex arithmetic and root finding,
//! [`twobox`] the structure constants of the 2-box spaces,
//! [`skein`] a combinatorial-map diagram engine with face reduction,
//! [`threebox`] the 14-diagram 3-box basis with its Gram matrix and triangle table,
//! and [`classify`] the end-to-end pipeline from a loop value to a verified braid.

pub mod classify;
pub mod error;
pub mod scalar;
pub mod skein;
pub mod threebox;
pub mod twobox;

pub use error::{Error, Result};
pub use scalar::{Scalar, Tolerance};
