//! State-vector quantum circuit simulation and quantum machine learning building blocks.
//!
//! Layers, bottom up:
//! - [`sim`]: dense state vectors, gate kernels, sampling, Pauli expectations
//! - [`circuit`]: parameterized circuits, execution, gate fusion, JSON form
//! - [`encoding`]: basis, angle and amplitude encoding of classical data
//! - [`variational`]: costs, parameter-shift gradients, training, QCNN, Hadamard test
//! - [`bosonic`]: one qubit coupled to a truncated Fock qumode, R-ECD token encoding
//! - [`exec`]: batched execution over a worker pool and scaling benchmarks
//!
//! Qubit `q` is bit `q` of a basis-state index throughout.

pub mod bosonic;
pub mod circuit;
pub mod encoding;
pub mod error;
pub mod exec;
pub mod linalg;
pub mod rng;
pub mod sim;
pub mod variational;

pub use circuit::{Circuit, CircuitOp, GateKind, Param};
pub use error::{Error, Result};
pub use linalg::{CMatrix, C64};
pub use sim::{GateMatrix, Observable, PauliString, ShotHistogram, StateVector};
