//! Classical and quantum reference frames for particles on a line.
//!
//! The crate is organised in layers:
//!
//! - [`classical`]: the constrained phase space with total-momentum
//!   constraint, gauge fixing to a particle's position, embedding and
//!   projection of reduced phase spaces, the Dirac bracket and the classical
//!   frame switch, plus reduced dynamics and the harmonic-oscillator model.
//! - [`grid`]: wavefunctions on periodic tensor-product grids, spectral
//!   position/momentum changes, polynomial observables and dense-matrix
//!   oracles.
//! - [`dirac`]: physical states stored through one frame reduction, the
//!   physical inner product, reduced Hamiltonians and the trivialization
//!   family.
//! - [`switch`]: the quantum frame switch with two independent backends.
//! - [`wigner`]: Wigner functions, partial traces, negativity and
//!   entanglement entropy.
//!
//! Units are natural throughout (ħ = 1). Three-particle quantum states use
//! the labels A, B, C for frame indices 0, 1, 2.

pub mod classical;
pub mod dirac;
pub mod error;
pub mod grid;
pub mod switch;
pub mod wigner;

pub use error::{Error, Result};
