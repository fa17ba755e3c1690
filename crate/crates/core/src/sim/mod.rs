//! Exact simulation of the qubit + qumode register.

pub mod ansatz;
pub mod gates;
pub mod state;

pub use ansatz::{evolve_noisy, run_ansatz, AnsatzParameters, AnsatzSimulator, ModeGate};
pub use gates::{displacement_matrix, qubit_rotation, Displacer};
pub use state::{exact_probabilities, sample_histogram, HybridDensityMatrix, HybridPureState, StateRecord};
