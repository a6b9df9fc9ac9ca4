//! Quantum computational power of thermal spin-cluster resource states.
//!
//! Two exactly solvable models are built from identical units: a spin-3/2
//! center coupled to three virtual spin-1/2 bond qubits. Either an XXZ
//! anisotropy `δ` or an on-site `d_z` term deforms the Heisenberg point. The
//! crate follows one unit from its Hamiltonian to a verdict on whether the
//! lattice-wide thermal state is a fault-tolerant resource for
//! measurement-based quantum computation:
//!
//! 1. [`models`]: unit Hamiltonians, closed-form and numerical spectra.
//! 2. [`thermal`]: Gibbs state of one unit.
//! 3. [`distill`]: POVM distillation of a 4-qubit GHZ state.
//! 4. [`pauli`]: stabilizer twirl and the 16 inequivalent Pauli error classes.
//! 5. [`cluster`]: propagation of GHZ errors onto cluster-state qubits,
//!    checked against a brute-force simulation of the merge/shrink/CZ block.
//! 6. [`percolation`]: site-percolation thresholds and the loss
//!    renormalization curve `k(p_l)`.
//! 7. [`phase`]: 2D/3D threshold verdicts and boundary temperatures.

pub mod cluster;
pub mod distill;
pub mod error;
pub mod grid;
pub mod models;
pub mod pauli;
pub mod percolation;
pub mod phase;
pub mod spin;
pub mod thermal;
pub mod tolerances;

pub use error::{Error, Result};
pub use models::{Model, ModelParams, SpectrumSummary};
pub use spin::{CMatrix, CVector, C64};

/// Version string embedded in output metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
