//! Dense state-vector simulation: states, gates, measurement and Pauli expectations.

pub mod gates;
pub mod kernel;
pub mod measure;
pub mod pauli;
pub mod state;

pub use gates::GateMatrix;
pub use kernel::Parallelism;
pub use measure::{measure_qubit, sample_shots, ShotHistogram};
pub use pauli::{expectation_pauli, Observable, Pauli, PauliString};
pub use state::{inner_product, new_zero_state, Amplitude, StateVector, DEFAULT_MAX_QUBITS};
