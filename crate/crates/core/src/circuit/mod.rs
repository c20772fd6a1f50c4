//! Circuits with parameter slots: construction, binding, execution, fusion and JSON.

mod fusion;
mod json;
mod op;

pub use fusion::{fuse, memory_bandwidth, FusionCostModel};
pub use json::{deserialize, serialize};
pub use op::{CircuitOp, GateKind, Param};

use crate::error::{Error, Result};
use crate::sim::kernel::{self, Parallelism};
use crate::sim::state::StateVector;

/// Counters filled in by [`execute`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExecutionStats {
    /// One per op applied, since every op sweeps the state once.
    pub gate_passes: usize,
    /// How many of those ops were fused matrix literals.
    pub fused_groups: usize,
}

/// Ordered gate list over `n_qubits` with `n_slots` free parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    n_slots: usize,
    ops: Vec<CircuitOp>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self::with_slots(n_qubits, 0)
    }

    pub fn with_slots(n_qubits: usize, n_slots: usize) -> Self {
        Self {
            n_qubits,
            n_slots,
            ops: Vec::new(),
        }
    }

    /// Builds a circuit from parts, validating every op.
    pub fn from_ops(n_qubits: usize, n_slots: usize, ops: Vec<CircuitOp>) -> Result<Self> {
        let mut c = Self::with_slots(n_qubits, n_slots);
        for op in ops {
            c.push(op)?;
        }
        Ok(c)
    }

    /// For ops already known to be valid, such as edited copies of a validated circuit.
    pub(crate) fn from_validated(n_qubits: usize, n_slots: usize, ops: Vec<CircuitOp>) -> Self {
        Self {
            n_qubits,
            n_slots,
            ops,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_slots(&self) -> usize {
        self.n_slots
    }

    pub fn ops(&self) -> &[CircuitOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn is_bound(&self) -> bool {
        self.n_slots == 0 && self.ops.iter().all(CircuitOp::is_bound)
    }

    /// Grows the slot count so later ops can reference new slots.
    pub fn add_slots(&mut self, extra: usize) -> usize {
        let first = self.n_slots;
        self.n_slots += extra;
        first
    }

    pub fn push(&mut self, op: CircuitOp) -> Result<&mut Self> {
        op.validate(self.n_qubits, self.n_slots)?;
        self.ops.push(op);
        Ok(self)
    }

    /// Appends all ops of `other`, which must have the same width and no more slots.
    pub fn append(&mut self, other: &Circuit) -> Result<&mut Self> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::validation(format!(
                "cannot append {}-qubit circuit to {}-qubit circuit",
                other.n_qubits, self.n_qubits
            )));
        }
        for op in &other.ops {
            self.push(op.clone())?;
        }
        Ok(self)
    }

    pub fn gate(
        &mut self,
        gate: GateKind,
        targets: &[usize],
        controls: &[usize],
        params: &[Param],
    ) -> Result<&mut Self> {
        self.push(CircuitOp::new(
            gate,
            targets.to_vec(),
            controls.to_vec(),
            params.to_vec(),
        ))
    }

    pub fn x(&mut self, q: usize) -> Result<&mut Self> {
        self.gate(GateKind::X, &[q], &[], &[])
    }

    pub fn y(&mut self, q: usize) -> Result<&mut Self> {
        self.gate(GateKind::Y, &[q], &[], &[])
    }

    pub fn z(&mut self, q: usize) -> Result<&mut Self> {
        self.gate(GateKind::Z, &[q], &[], &[])
    }

    pub fn h(&mut self, q: usize) -> Result<&mut Self> {
        self.gate(GateKind::H, &[q], &[], &[])
    }

    pub fn rx(&mut self, q: usize, theta: impl Into<Param>) -> Result<&mut Self> {
        self.gate(GateKind::Rx, &[q], &[], &[theta.into()])
    }

    pub fn ry(&mut self, q: usize, theta: impl Into<Param>) -> Result<&mut Self> {
        self.gate(GateKind::Ry, &[q], &[], &[theta.into()])
    }

    pub fn rz(&mut self, q: usize, theta: impl Into<Param>) -> Result<&mut Self> {
        self.gate(GateKind::Rz, &[q], &[], &[theta.into()])
    }

    pub fn phase(&mut self, q: usize, lambda: impl Into<Param>) -> Result<&mut Self> {
        self.gate(GateKind::Phase, &[q], &[], &[lambda.into()])
    }

    pub fn cnot(&mut self, control: usize, target: usize) -> Result<&mut Self> {
        self.gate(GateKind::Cnot, &[target], &[control], &[])
    }

    pub fn cz(&mut self, control: usize, target: usize) -> Result<&mut Self> {
        self.gate(GateKind::Cz, &[target], &[control], &[])
    }

    pub fn swap(&mut self, a: usize, b: usize) -> Result<&mut Self> {
        self.gate(GateKind::Swap, &[a, b], &[], &[])
    }

    /// Same circuit on a wider register, every op gaining `extra_controls`.
    pub fn controlled_on(&self, n_qubits: usize, extra_controls: &[usize]) -> Result<Circuit> {
        let mut out = Circuit::with_slots(n_qubits, self.n_slots);
        for op in &self.ops {
            let mut op = op.clone();
            op.controls.extend_from_slice(extra_controls);
            out.push(op)?;
        }
        Ok(out)
    }

    /// Replaces every slot reference by its value.
    pub fn bind_parameters(&self, values: &[f64]) -> Result<Circuit> {
        if values.len() != self.n_slots {
            return Err(Error::validation(format!(
                "circuit has {} slot(s), got {} value(s)",
                self.n_slots,
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::validation(format!("non-finite parameter value {v}")));
        }
        let ops = self
            .ops
            .iter()
            .map(|op| CircuitOp {
                params: op
                    .params
                    .iter()
                    .map(|p| Param::Value(p.resolve(values)))
                    .collect(),
                ..op.clone()
            })
            .collect();
        Ok(Circuit {
            n_qubits: self.n_qubits,
            n_slots: 0,
            ops,
        })
    }

    /// Runs the circuit on `initial`.
    pub fn execute(&self, initial: &StateVector) -> Result<StateVector> {
        execute(self, initial, None)
    }
}

/// Applies every op of a bound circuit in order.
pub fn execute(
    circuit: &Circuit,
    initial: &StateVector,
    stats: Option<&mut ExecutionStats>,
) -> Result<StateVector> {
    let mut state = initial.clone();
    execute_in_place(circuit, &mut state, stats, Parallelism::Auto)?;
    Ok(state)
}

/// In-place variant of [`execute`] with explicit control over intra-gate parallelism.
pub fn execute_in_place(
    circuit: &Circuit,
    state: &mut StateVector,
    stats: Option<&mut ExecutionStats>,
    parallelism: Parallelism,
) -> Result<()> {
    if !circuit.is_bound() {
        return Err(Error::validation(format!(
            "circuit has {} unbound slot(s); bind parameters before execution",
            circuit.n_slots
        )));
    }
    if circuit.n_qubits != state.n_qubits() {
        return Err(Error::validation(format!(
            "circuit acts on {} qubits, state has {}",
            circuit.n_qubits,
            state.n_qubits()
        )));
    }
    let mut local = ExecutionStats::default();
    let n = state.n_qubits();
    for op in &circuit.ops {
        let gate = op.matrix(&[]);
        kernel::apply_matrix(
            state.amplitudes_mut(),
            n,
            gate.matrix(),
            &op.targets,
            &op.controls,
            parallelism,
        );
        local.gate_passes += 1;
        if matches!(op.gate, GateKind::Fused(_)) {
            local.fused_groups += 1;
        }
    }
    if let Some(s) = stats {
        *s = local;
    }
    Ok(())
}
