//! Quantum simulation.
//!
//! Dense statevectors and density matrices (basis index bit `k` is qubit `k`,
//! qubit 0 least significant), circuits over `{X, Z, H, CNOT, CCX}` with
//! computational-basis measurement and `|0>` initialization, coherent
//! deferral of measurements, the input-recovering construction, oracle
//! unitaries, and a sparse simulator for classical mixtures of basis states
//! too wide for dense simulation.

mod circuit;
pub mod corpus;
mod ensemble;
mod recover;
mod state;

pub use circuit::{make_coherent, oracle_unitary, CoherentUnitary, Op, QuantumCircuit};
pub use ensemble::BasisEnsemble;
pub use recover::{input_recover_channel, input_recover_run, RecoveryRun};
pub use state::{trace_distance, DensityMatrix, StateVector, C64};

use thiserror::Error;

pub const MAX_STATEVECTOR_QUBITS: usize = 22;
pub const MAX_DENSITY_QUBITS: usize = 10;
pub const PSD_FLOOR: f64 = -1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QsimError {
    #[error("{kind} on {n} qubits exceeds the limit of {limit}")]
    TooLarge { kind: &'static str, n: usize, limit: usize },
    #[error("dimension mismatch: {0} vs {1} qubits")]
    Dimension(usize, usize),
    #[error("malformed circuit: {0}")]
    Structure(String),
    #[error("not a valid state: {0}")]
    InvalidState(String),
}

#[cfg(test)]
mod tests;
