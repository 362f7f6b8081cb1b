//! Majorization and entropic uncertainty relations for mixed qubit states.
//!
//! - [`qubit`]: density matrices, Stokes vectors, observables, entropies.
//! - [`majorization`]: direct sums, Lorenz curves and the optimal bound vectors.
//! - [`entropy`]: entropic uncertainty sums and the competing lower bounds.
//! - [`bench`]: a simulated two-beam polarization bench with noisy tomography.
//! - [`harness`]: dataset sweeps, random-state verification, tightness scans
//!   and the command-line front end.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod entropy;
pub mod error;
pub mod harness;
pub mod majorization;
pub mod qubit;

pub use error::{Error, Result};
