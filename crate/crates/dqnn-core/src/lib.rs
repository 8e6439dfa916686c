//! Density-matrix simulation and training of dissipative quantum neural
//! networks (DQNNs): layered networks of perceptron unitaries that couple
//! each layer's qubits to fresh ancillas and trace out the previous layer.
//!
//! The crate is `no_std`-compatible (requires `alloc`); file formats, the
//! CLI and anything touching the filesystem live in the companion crate.
//!
//! Module map:
//! - [`qcore`]: dense complex linear algebra (tensor products, partial
//!   trace, Hermitian matrix exponential, fidelity, qubit embedding).
//! - [`pauli`]: Pauli-string enumeration and perceptron generators.
//! - [`network`]: network topology, layer maps, conjugate-layer bindings,
//!   forward propagation, optional embedded noise channel.
//! - [`channels`]: Kraus channels (bit flip, amplitude damping), trajectory
//!   sampling and the damping corruption-state constructors.
//! - [`codes`]: logical encoders, Bloch parameterization, dataset builders,
//!   the classical syndrome decoder and codeword extraction.
//! - [`training`]: fidelity cost, finite-difference gradients, optimizers,
//!   session orchestration and the swap-test estimator.
//! - [`eval`]: Bloch-mesh fidelity reports, conditional fidelities and the
//!   comparison against the syndrome-decoder baseline.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod channels;
pub mod codes;
mod error;
pub mod eval;
pub mod network;
pub mod pauli;
pub mod qcore;
pub mod rng;
#[cfg(test)]
pub(crate) mod testutil;
pub mod training;

pub use error::{Error, Result};
pub use qcore::{CMatrix, DensityMatrix, PureState, UnitaryMatrix, C64};
