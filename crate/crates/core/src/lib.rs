//! Density-matrix dynamics and entropy functionals for open quantum systems
//! described by non-Hermitian Hamiltonians 𝓗 = H − iΓ.
//!
//! The crate is `no_std` and needs only `alloc`. It covers
//!
//! * dense complex matrices and Hermitian spectral functions ([`matrix`], [`hermitian`]),
//! * propagation of the non-normalised density matrix Ω and of ρ = Ω/Tr Ω ([`dynamics`]),
//! * von Neumann, non-Hermitian, linear and non-Hermitian linear entropies and
//!   their production rates ([`entropy`]),
//! * a quantum subsystem coupled to a classical bath on a phase-space grid ([`wigner`]),
//! * closed-form solutions for a decay operator proportional to the identity ([`oracle`]).

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod dynamics;
pub mod entropy;
pub mod error;
pub mod hermitian;
pub mod integrator;
pub mod matrix;
pub mod model;
pub mod oracle;
pub mod wigner;

pub use error::{Error, Result};
pub use hermitian::HermitianOperator;
pub use integrator::IntegratorSpec;
pub use matrix::{ComplexMatrix, C64};
pub use model::{DensityState, NonHermitianHamiltonian};
