//! Constrained binary optimization on a hybrid register of one qubit and a
//! few truncated bosonic modes.
//!
//! A problem goes through [`qubo`] (penalties, slack bits, Pauli-Z
//! Hamiltonian), is mapped onto qumode Fock states by [`hilbert`], and is
//! solved by the variational loop in [`vqe`], which drives the echoed
//! conditional displacement ansatz of [`sim`]. [`noise`] adds photon loss,
//! and [`qaoa`] is a qubit-only reference solver for the same Hamiltonian.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod hilbert;
pub mod noise;
pub mod optim;
pub mod qaoa;
pub mod qubo;
pub mod sim;
pub mod vqe;

pub use error::{Error, Result};
