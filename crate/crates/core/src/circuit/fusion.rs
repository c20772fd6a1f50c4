//! Gate fusion: merge runs of gates on small qubit sets into matrix literals so the
//! state vector is swept fewer times.

use super::{Circuit, CircuitOp};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ONE, ZERO};
use crate::sim::kernel::{self, Parallelism};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FusionCostModel {
    /// Bytes per stored amplitude.
    pub amplitude_bytes: u64,
    /// Widest fused block, in qubits.
    pub max_fused_qubits: usize,
}

impl Default for FusionCostModel {
    fn default() -> Self {
        Self {
            amplitude_bytes: 8,
            max_fused_qubits: 5,
        }
    }
}

impl FusionCostModel {
    pub fn with_max_qubits(max_fused_qubits: usize) -> Self {
        Self {
            max_fused_qubits,
            ..Self::default()
        }
    }

    pub fn state_bytes(&self, n_qubits: usize) -> u64 {
        self.amplitude_bytes << n_qubits
    }

    /// Estimated bytes moved to execute `circuit`, summing [`memory_bandwidth`] per op.
    pub fn estimated_traffic(&self, circuit: &Circuit) -> f64 {
        let sv = self.state_bytes(circuit.n_qubits());
        circuit
            .ops()
            .iter()
            .map(|op| memory_bandwidth(sv, op.controls.len() as u32))
            .sum()
    }
}

/// Bytes read plus written by one gate sweep: `2 · sv_size_bytes / 2^n_controls`.
///
/// Each control halves the touched amplitudes.
pub fn memory_bandwidth(sv_size_bytes: u64, n_controls: u32) -> f64 {
    2.0 * sv_size_bytes as f64 / 2f64.powi(n_controls as i32)
}

struct Group {
    mask: u64,
    ops: Vec<usize>,
}

/// Greedy left-to-right fusion.
///
/// Each open group covers a set of qubits. An incoming op merges every open group it
/// overlaps, provided the union stays within `max_fused_qubits`; otherwise those
/// groups are flushed first. Groups holding a single op are emitted unchanged, larger
/// ones become one `fused` matrix literal over their sorted qubits.
pub fn fuse(circuit: &Circuit, model: &FusionCostModel) -> Result<Circuit> {
    if model.max_fused_qubits == 0 {
        return Err(Error::validation("max_fused_qubits must be at least 1"));
    }
    if !circuit.is_bound() {
        return Err(Error::validation("fusion requires a fully bound circuit"));
    }
    let ops = circuit.ops();
    let mut out = Circuit::new(circuit.n_qubits());
    let mut open: Vec<Group> = Vec::new();

    for (idx, op) in ops.iter().enumerate() {
        let mask = op.qubit_mask();
        let (hit, rest): (Vec<Group>, Vec<Group>) =
            open.into_iter().partition(|g| g.mask & mask != 0);
        open = rest;
        let union = hit.iter().fold(mask, |m, g| m | g.mask);

        if union.count_ones() as usize <= model.max_fused_qubits {
            let mut merged: Vec<usize> = hit.into_iter().flat_map(|g| g.ops).collect();
            merged.sort_unstable();
            merged.push(idx);
            open.push(Group {
                mask: union,
                ops: merged,
            });
            continue;
        }

        for g in hit {
            emit(&mut out, ops, g)?;
        }
        if mask.count_ones() as usize <= model.max_fused_qubits {
            open.push(Group {
                mask,
                ops: vec![idx],
            });
        } else {
            out.push(op.clone())?;
        }
    }
    for g in open {
        emit(&mut out, ops, g)?;
    }
    Ok(out)
}

fn emit(out: &mut Circuit, ops: &[CircuitOp], group: Group) -> Result<()> {
    if group.ops.len() == 1 {
        out.push(ops[group.ops[0]].clone())?;
        return Ok(());
    }
    let qubits: Vec<usize> = (0..64).filter(|q| group.mask >> q & 1 == 1).collect();
    let matrix = group_matrix(&qubits, group.ops.iter().map(|&i| &ops[i]));
    out.push(CircuitOp::fused(matrix, qubits))?;
    Ok(())
}

/// Product of the ops (first op rightmost) as a matrix over `qubits`,
/// where `qubits[j]` is matrix index bit `j`.
fn group_matrix<'a>(qubits: &[usize], ops: impl Iterator<Item = &'a CircuitOp>) -> CMatrix {
    let k = qubits.len();
    let dim = 1usize << k;
    let local = |q: usize| qubits.iter().position(|&x| x == q).expect("qubit in group");

    // columns[c] is the image of basis vector |c⟩
    let mut columns: Vec<Vec<C64>> = (0..dim)
        .map(|c| {
            let mut v = vec![ZERO; dim];
            v[c] = ONE;
            v
        })
        .collect();
    for op in ops {
        let targets: Vec<usize> = op.targets.iter().map(|&q| local(q)).collect();
        let controls: Vec<usize> = op.controls.iter().map(|&q| local(q)).collect();
        let gate = op.matrix(&[]);
        for col in &mut columns {
            kernel::apply_matrix(
                col,
                k,
                gate.matrix(),
                &targets,
                &controls,
                Parallelism::Sequential,
            );
        }
    }
    let mut m = CMatrix::zeros(dim);
    for (c, col) in columns.iter().enumerate() {
        for (r, &v) in col.iter().enumerate() {
            m.set(r, c, v);
        }
    }
    m
}
