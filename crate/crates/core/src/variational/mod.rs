//! Variational circuits: costs, gradients, training and ansatz builders.

mod cost;
mod gradient;
mod hadamard;
mod qcnn;
mod train;

pub use cost::{evaluate_cost, CostSpec, PostProcess};
pub use gradient::{parameter_shift_gradient, GradientResult};
pub use hadamard::{hadamard_test, hadamard_test_circuit};
pub use qcnn::{build_qcnn, QcnnStage, QcnnTopology, SLOTS_PER_STAGE};
pub use train::{
    evaluate_dataset, train, EpochRecord, Init, Optimizer, TrainConfig, TrainInput, TrainOutcome,
    TrainSample,
};
