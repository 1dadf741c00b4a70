//! Schrödinger evolution of subspaces and the speed limits that bound it.
//!
//! The crate simulates the projector path `P(t) = e^{-iHt} P₀ e^{iHt}` for a
//! finite Hermitian `H`, measures the maximal angle between `ran P₀` and
//! `ran P(t)`, and compares the first time that angle reaches `θ` with three
//! lower bounds: `θ / ‖[H, P₀]‖`, `θ / ΔE` (maximal energy dispersion over
//! unit vectors of the subspace) and `2θ / (E_max − E_min)`.
//!
//! Everything here is `no_std` + `alloc`; file formats and the command-line
//! front end live in the companion `subqsl-cli` crate.

#![no_std]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod bounds;
pub mod error;
pub mod evolution;
pub mod linalg;
pub mod scenarios;
pub mod subspace;

pub use error::{BoundViolation, QslError, Result};
pub use num_complex::Complex64;
