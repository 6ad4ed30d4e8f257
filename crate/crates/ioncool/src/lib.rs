//! Numerical simulations of trapped-ion cooling.
//!
//! The crate is organised around four layers:
//!
//! * [`quantum`] — finite-dimensional state/operator algebra over a
//!   composite internal ⊗ motional Hilbert space with Fock truncation,
//! * [`hamiltonians`] — carrier/sideband interaction Hamiltonians, the
//!   MAGIC effective Lamb-Dicke coupling, Raman geometry and the
//!   three-level EIT Hamiltonian,
//! * [`dynamics`] — Schrödinger and Lindblad time evolution, Liouvillian
//!   steady states and observable extraction,
//! * [`cooling`] — runnable cooling experiments: Doppler, resistive,
//!   resolved-sideband, EIT spectra and multi-mode RF sideband cooling.
//!
//! All matrices are dense complex double precision; target dimensions are
//! a few hundred at most.

pub mod constants;
pub mod cooling;
pub mod dynamics;
mod error;
mod gemm;
pub mod hamiltonians;
mod ode;
pub mod quantum;
pub mod species;

pub use error::{IonError, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex<f64>;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex vector.
pub type CVector = nalgebra::DVector<C64>;
