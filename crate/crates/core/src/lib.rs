//! Desk-scale numerics for the Gauss circle and Dirichlet divisor problems.
//!
//! The crate is `no_std` (it needs `alloc`) and carries no IO. It covers:
//!
//! * [`error_terms`]: exact lattice counts and divisor sums, their error terms
//!   and the sawtooth recompositions of those error terms;
//! * [`exp_sums`]: the double exponential sum `S`, the phase families that
//!   feed it, Case A/B classification, the derived parameter block and the
//!   bound formulas of the Bombieri–Iwaniec reduction;
//! * [`first_spacing`]: the mean value `G_q`, the Diophantine counting
//!   problem behind it, the cone parametrisation, plate partitions and the
//!   decoupling bounds;
//! * [`second_spacing`]: minor-arc data, the `x_{a/r}` vectors and the
//!   unimodular matrices linking pairs of arcs;
//! * [`exponents`]: the exponent pipeline ending in `θ* = 0.31448…`.
//!
//! Every routine is pure; callers are free to evaluate in parallel.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error_terms;
pub mod exp_sums;
pub mod exponents;
pub mod first_spacing;
pub mod numeric;
pub mod phase;
pub mod second_spacing;

mod error;

pub use error::{Error, Result};
pub use phase::PhaseFamily;
