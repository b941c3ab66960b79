//! Photon blockade in the driven, damped Jaynes-Cummings oscillator.
//!
//! The crate builds the master-equation generator for a two-level atom
//! coupled to a driven lossy cavity mode, solves for its stationary state,
//! and evaluates photon statistics, fluorescence spectra and Wigner
//! functions. An effective four-level model of the two-photon resonance
//! supplies closed-form benchmarks for the numerics.

pub mod effective;
pub mod error;
pub mod hilbert;
pub mod liouvillian;
pub mod observables;
pub mod propagate;
pub mod regression;
pub mod repro;
pub mod sparse;
pub mod steadystate;

pub use error::{Error, Result};
pub use hilbert::{JcOperators, ModelParams, Operator, StateVector};
pub use liouvillian::{build_liouvillian, DensityMatrix, Superoperator};
pub use steadystate::{expectation, steady_state};
