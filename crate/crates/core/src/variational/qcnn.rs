//! Quantum convolutional network ansatz with pooling that halves the active qubits.
//!
//! Stage `s` pairs neighbouring active qubits `(a, b)` in index order and applies:
//! - convolution: `Ry(c0)` on `a`, `Ry(c1)` on `b`, CNOT `a → b`, `Ry(c2)` on `a`,
//!   `Ry(c3)` on `b`, with `c0..c3` shared by every pair of the stage;
//! - pooling: a `b`-controlled `Ry(p)` on `a`, after which `b` is dropped.
//!
//! The controlled rotation is expanded as `Ry(p/2) · CNOT(b→a) · Ry(−p/2) · CNOT(b→a)`
//! so every parameterized gate stays an uncontrolled rotation and parameter-shift
//! differentiation applies. Pooling is measurement-free: dropped qubits are simply
//! left out of later stages. The readout is `⟨Z⟩` on the one qubit left, which is
//! always qubit 0.

use crate::circuit::{Circuit, Param};
use crate::error::{Error, Result};
use crate::sim::pauli::{Observable, PauliString};

/// Parameter slots introduced per stage: four convolution angles and one pooling angle.
pub const SLOTS_PER_STAGE: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QcnnStage {
    /// Qubits active when the stage starts.
    pub active: Vec<usize>,
    pub conv_slots: [usize; 4],
    pub pool_slot: usize,
    /// `(dropped control, kept target)` per pair.
    pub pool_pairs: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QcnnTopology {
    pub n_qubits: usize,
    pub stages: Vec<QcnnStage>,
    pub readout_qubit: usize,
}

impl QcnnTopology {
    /// Active qubit counts before each stage, then after the last one.
    pub fn active_counts(&self) -> Vec<usize> {
        let mut counts: Vec<usize> = self.stages.iter().map(|s| s.active.len()).collect();
        counts.push(1);
        counts
    }

    pub fn readout_observable(&self) -> Observable {
        Observable::single(PauliString::z(self.n_qubits, self.readout_qubit))
    }
}

/// Builds the ansatz for `n_qubits ∈ {2, 4, 8, 16}`; it has `5 · log2(n)` slots.
pub fn build_qcnn(n_qubits: usize) -> Result<(Circuit, QcnnTopology)> {
    if !matches!(n_qubits, 2 | 4 | 8 | 16) {
        return Err(Error::validation(format!(
            "QCNN width must be 2, 4, 8 or 16, got {n_qubits}"
        )));
    }
    let n_stages = n_qubits.trailing_zeros() as usize;
    let mut c = Circuit::with_slots(n_qubits, n_stages * SLOTS_PER_STAGE);
    let mut active: Vec<usize> = (0..n_qubits).collect();
    let mut stages = Vec::with_capacity(n_stages);

    for s in 0..n_stages {
        let base = s * SLOTS_PER_STAGE;
        let conv = [base, base + 1, base + 2, base + 3];
        let pool = base + 4;
        let pairs: Vec<(usize, usize)> = active.chunks(2).map(|p| (p[0], p[1])).collect();

        for &(a, b) in &pairs {
            c.ry(a, Param::slot(conv[0]))?
                .ry(b, Param::slot(conv[1]))?
                .cnot(a, b)?
                .ry(a, Param::slot(conv[2]))?
                .ry(b, Param::slot(conv[3]))?;
        }
        for &(a, b) in &pairs {
            c.ry(a, Param::scaled_slot(pool, 0.5))?
                .cnot(b, a)?
                .ry(a, Param::scaled_slot(pool, -0.5))?
                .cnot(b, a)?;
        }

        stages.push(QcnnStage {
            active: active.clone(),
            conv_slots: conv,
            pool_slot: pool,
            pool_pairs: pairs.iter().map(|&(a, b)| (b, a)).collect(),
        });
        active = pairs.iter().map(|&(a, _)| a).collect();
    }

    Ok((
        c,
        QcnnTopology {
            n_qubits,
            stages,
            readout_qubit: active[0],
        },
    ))
}
