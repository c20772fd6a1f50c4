//! JSON form of a circuit.
//!
//! ```json
//! { "n_qubits": 2, "n_slots": 1,
//!   "ops": [ { "gate": "ry", "targets": [0], "controls": [], "params": [{"slot": 0}] },
//!            { "gate": "cnot", "targets": [1], "controls": [0], "params": [] } ] }
//! ```
//!
//! Fused ops carry `"matrix"` as row-major `[re, im]` pairs. A slot reference may carry
//! an optional `"scale"` (default 1). Keys are always written in the order above.

use super::{Circuit, CircuitOp, GateKind, Param};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::sim::gates::GateMatrix;
use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitDoc {
    n_qubits: usize,
    #[serde(default)]
    n_slots: usize,
    ops: Vec<OpDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OpDoc {
    gate: String,
    targets: Vec<usize>,
    #[serde(default)]
    controls: Vec<usize>,
    #[serde(default)]
    params: Vec<ParamDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<[f64; 2]>>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ParamDoc {
    Value(f64),
    Slot(SlotDoc),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SlotDoc {
    slot: usize,
    #[serde(default = "unit_scale", skip_serializing_if = "is_unit_scale")]
    scale: f64,
}

fn unit_scale() -> f64 {
    1.0
}

fn is_unit_scale(s: &f64) -> bool {
    *s == 1.0
}

pub fn serialize(circuit: &Circuit) -> String {
    let doc = CircuitDoc {
        n_qubits: circuit.n_qubits(),
        n_slots: circuit.n_slots(),
        ops: circuit.ops().iter().map(op_to_doc).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("circuit documents always serialize")
}

fn op_to_doc(op: &CircuitOp) -> OpDoc {
    let matrix = match &op.gate {
        GateKind::Fused(m) => Some(m.matrix().data().iter().map(|c| [c.re, c.im]).collect()),
        _ => None,
    };
    OpDoc {
        gate: op.gate.name().to_string(),
        targets: op.targets.clone(),
        controls: op.controls.clone(),
        params: op
            .params
            .iter()
            .map(|p| match *p {
                Param::Value(v) => ParamDoc::Value(v),
                Param::Slot { index, scale } => ParamDoc::Slot(SlotDoc { slot: index, scale }),
            })
            .collect(),
        matrix,
    }
}

pub fn deserialize(text: &str) -> Result<Circuit> {
    let doc: CircuitDoc = serde_json::from_str(text).map_err(|e| {
        Error::parse(format!(
            "invalid circuit JSON at line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })?;
    if doc.n_qubits == 0 {
        return Err(Error::parse("n_qubits: must be at least 1"));
    }
    let mut circuit = Circuit::with_slots(doc.n_qubits, doc.n_slots);
    for (i, op) in doc.ops.into_iter().enumerate() {
        let op = doc_to_op(op).map_err(|e| Error::parse(format!("ops[{i}].{e}")))?;
        circuit
            .push(op)
            .map_err(|e| Error::parse(format!("ops[{i}]: {}", strip_class(&e))))?;
    }
    Ok(circuit)
}

fn strip_class(e: &Error) -> String {
    match e {
        Error::Validation(m) | Error::Parse(m) | Error::Capacity(m) => m.clone(),
        other => other.to_string(),
    }
}

fn doc_to_op(doc: OpDoc) -> std::result::Result<CircuitOp, String> {
    let gate = if doc.gate.eq_ignore_ascii_case("fused") {
        let entries = doc
            .matrix
            .ok_or_else(|| "matrix: fused gate requires a matrix".to_string())?;
        let dim = 1usize << doc.targets.len();
        if entries.len() != dim * dim {
            return Err(format!(
                "matrix: expected {} entries for {} targets, got {}",
                dim * dim,
                doc.targets.len(),
                entries.len()
            ));
        }
        let m = CMatrix::from_rows(
            dim,
            entries.iter().map(|&[re, im]| C64::new(re, im)).collect(),
        );
        GateKind::Fused(GateMatrix::new(m).map_err(|e| format!("matrix: {}", strip_class(&e)))?)
    } else {
        if doc.matrix.is_some() {
            return Err(format!(
                "matrix: only fused gates carry a matrix, got '{}'",
                doc.gate
            ));
        }
        doc.gate
            .parse::<GateKind>()
            .map_err(|e| format!("gate: {}", strip_class(&e)))?
    };
    let params = doc
        .params
        .into_iter()
        .map(|p| match p {
            ParamDoc::Value(v) => Param::Value(v),
            ParamDoc::Slot(s) => Param::Slot {
                index: s.slot,
                scale: s.scale,
            },
        })
        .collect();
    Ok(CircuitOp::new(gate, doc.targets, doc.controls, params))
}
