//! Numerics for massless Dirac operators `-i σ·∇ + q` (2-D) and `-i α·∇ + q` (3-D)
//! with real scalar potentials.
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! * [`clifford`]: Pauli and Dirac matrices, `α·v`, closed-form exponentials and
//!   eigen-spinor selection.
//! * [`potential`]: a small expression language for potentials with forward-mode
//!   gradients.
//! * [`explicit`]: closed-form zero modes and layered eigensolutions, a 4th-order
//!   stencil for the Dirac expression, residual and weighted norms.
//! * [`radial`]: the separated radial system, transfer matrices, monodromy,
//!   band maps, boundedness probes, BV checks and limit ranges.
//! * [`weyl`]: singular-sequence constructions and their residual reports, plus
//!   the mass-ratio analysis for polynomially bounded eigensolutions.
//! * [`virial`]: virial bounds, the virial integral, a staggered discretization of
//!   the radial operator and an L² solution probe.
//!
//! IO, configuration and the command line live in the `diracspec` crate.
#![no_std]
#![cfg_attr(test, allow(unused_imports))]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod clifford;
mod error;
pub mod explicit;
pub mod linalg;
pub mod ode;
pub mod potential;
pub mod quad;
pub mod radial;
pub mod virial;
pub mod weyl;

pub use error::{Error, ErrorClass, Result};
