//! State-vector simulation and variational ground-state search for spin
//! chains, with entanglement, gradient-variance and disorder-RG diagnostics.

pub mod ansatz;
pub mod entanglement;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod gradstats;
pub mod models;
pub mod pauli;
pub mod rg;
pub mod rng;
pub mod statevector;
pub mod vqe;

pub use ansatz::{AnsatzFamily, AnsatzSpec, GateSetTag, ImpurityGating, InitialState};
pub use error::{Error, Result};
pub use exact::{lowest_eigenpairs, ExactReference};
pub use pauli::{PauliString, PauliSum};
pub use rg::{run_rg, RgOutcome};
pub use statevector::{Circuit, Gate, GateKind, StateVector};
pub use vqe::{VqeConfig, VqeResult};
