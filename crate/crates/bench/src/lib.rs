//! Workloads shared by the benchmarks.

use qmlsim::circuit::{fuse, FusionCostModel};
use qmlsim::exec::layer_template;
use qmlsim::Circuit;

/// Bound layer template with fixed angles.
pub fn layered(n_qubits: usize, layers: usize) -> Circuit {
    let c = layer_template(n_qubits, layers).expect("template is valid");
    let values: Vec<f64> = (0..c.n_slots()).map(|i| 0.1 + 0.37 * i as f64).collect();
    c.bind_parameters(&values).expect("slot count matches")
}

/// Long runs of single-qubit rotations on each qubit between CNOT ladders.
pub fn rotation_runs(n_qubits: usize, depth: usize) -> Circuit {
    let mut c = Circuit::new(n_qubits);
    for d in 0..depth {
        for q in 0..n_qubits {
            let a = 0.05 * (d * n_qubits + q) as f64;
            c.rx(q, a)
                .unwrap()
                .rz(q, 2.0 * a)
                .unwrap()
                .ry(q, 3.0 * a)
                .unwrap();
        }
        if d % 4 == 3 {
            for q in 0..n_qubits - 1 {
                c.cnot(q, q + 1).unwrap();
            }
        }
    }
    c
}

pub fn fused(c: &Circuit, max_qubits: usize) -> Circuit {
    fuse(c, &FusionCostModel::with_max_qubits(max_qubits)).expect("bound circuit fuses")
}
