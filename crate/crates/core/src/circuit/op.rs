use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::sim::gates::{self, GateMatrix};
use crate::sim::state::validate_qubits;
use std::fmt;
use std::str::FromStr;

/// Symbolic gate identifier.
#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    S,
    T,
    Rx,
    Ry,
    Rz,
    /// `diag(1, e^{iλ})`.
    Phase,
    /// X with at least one control.
    Cnot,
    /// Z with at least one control.
    Cz,
    Swap,
    /// Matrix literal produced by fusion (or supplied directly).
    Fused(GateMatrix),
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::T => "t",
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::Rz => "rz",
            GateKind::Phase => "p",
            GateKind::Cnot => "cnot",
            GateKind::Cz => "cz",
            GateKind::Swap => "swap",
            GateKind::Fused(_) => "fused",
        }
    }

    pub fn n_targets(&self) -> usize {
        match self {
            GateKind::Swap => 2,
            GateKind::Fused(m) => m.arity(),
            _ => 1,
        }
    }

    pub fn n_params(&self) -> usize {
        match self {
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::Phase => 1,
            _ => 0,
        }
    }

    fn min_controls(&self) -> usize {
        match self {
            GateKind::Cnot | GateKind::Cz => 1,
            _ => 0,
        }
    }

    /// Gates of the form `exp(−iθP/2)` for a Pauli `P`, whose generator has
    /// eigenvalues ±1/2.
    pub fn is_pauli_rotation(&self) -> bool {
        matches!(self, GateKind::Rx | GateKind::Ry | GateKind::Rz)
    }

    /// Matrix on the targets for the given resolved parameter values.
    pub fn matrix(&self, params: &[f64]) -> GateMatrix {
        match self {
            GateKind::X | GateKind::Cnot => gates::x(),
            GateKind::Y => gates::y(),
            GateKind::Z | GateKind::Cz => gates::z(),
            GateKind::H => gates::h(),
            GateKind::S => gates::s(),
            GateKind::T => gates::t(),
            GateKind::Rx => gates::rx(params[0]),
            GateKind::Ry => gates::ry(params[0]),
            GateKind::Rz => gates::rz(params[0]),
            GateKind::Phase => gates::phase(params[0]),
            GateKind::Swap => gates::swap(),
            GateKind::Fused(m) => m.clone(),
        }
    }
}

impl FromStr for GateKind {
    type Err = Error;

    /// Parses every named gate. `"fused"` needs a matrix and is handled by the JSON reader.
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "x" => GateKind::X,
            "y" => GateKind::Y,
            "z" => GateKind::Z,
            "h" => GateKind::H,
            "s" => GateKind::S,
            "t" => GateKind::T,
            "rx" => GateKind::Rx,
            "ry" => GateKind::Ry,
            "rz" => GateKind::Rz,
            "p" | "phase" => GateKind::Phase,
            "cnot" | "cx" => GateKind::Cnot,
            "cz" => GateKind::Cz,
            "swap" => GateKind::Swap,
            _ => return Err(Error::parse(format!("unknown gate '{s}'"))),
        })
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A gate parameter: a literal angle or `scale · θ[slot]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Param {
    Value(f64),
    Slot { index: usize, scale: f64 },
}

impl Param {
    pub fn slot(index: usize) -> Self {
        Param::Slot { index, scale: 1.0 }
    }

    pub fn scaled_slot(index: usize, scale: f64) -> Self {
        Param::Slot { index, scale }
    }

    pub fn resolve(&self, values: &[f64]) -> f64 {
        match *self {
            Param::Value(v) => v,
            Param::Slot { index, scale } => scale * values[index],
        }
    }
}

impl From<f64> for Param {
    fn from(v: f64) -> Self {
        Param::Value(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitOp {
    pub gate: GateKind,
    pub params: Vec<Param>,
    pub targets: Vec<usize>,
    pub controls: Vec<usize>,
}

impl CircuitOp {
    pub fn new(
        gate: GateKind,
        targets: Vec<usize>,
        controls: Vec<usize>,
        params: Vec<Param>,
    ) -> Self {
        Self {
            gate,
            params,
            targets,
            controls,
        }
    }

    /// Bitmask of every qubit this op touches.
    pub fn qubit_mask(&self) -> u64 {
        self.targets
            .iter()
            .chain(&self.controls)
            .fold(0u64, |m, &q| m | (1 << q))
    }

    pub fn is_bound(&self) -> bool {
        self.params.iter().all(|p| matches!(p, Param::Value(_)))
    }

    /// Checks arity, parameter count, control requirements and qubit ranges.
    pub fn validate(&self, n_qubits: usize, n_slots: usize) -> Result<()> {
        let g = &self.gate;
        if self.targets.len() != g.n_targets() {
            return Err(Error::validation(format!(
                "gate '{g}' takes {} target(s), got {}",
                g.n_targets(),
                self.targets.len()
            )));
        }
        if self.params.len() != g.n_params() {
            return Err(Error::validation(format!(
                "gate '{g}' takes {} parameter(s), got {}",
                g.n_params(),
                self.params.len()
            )));
        }
        if self.controls.len() < g.min_controls() {
            return Err(Error::validation(format!(
                "gate '{g}' needs at least {} control(s)",
                g.min_controls()
            )));
        }
        for p in &self.params {
            match *p {
                Param::Value(v) if !v.is_finite() => {
                    return Err(Error::validation(format!(
                        "gate '{g}' has non-finite parameter"
                    )))
                }
                Param::Slot { index, .. } if index >= n_slots => {
                    return Err(Error::validation(format!(
                        "slot reference {index} >= n_slots {n_slots}"
                    )))
                }
                Param::Slot { scale, .. } if !scale.is_finite() => {
                    return Err(Error::validation("slot scale must be finite"))
                }
                _ => {}
            }
        }
        validate_qubits(n_qubits, &self.targets, &self.controls)
    }

    /// Target matrix with parameters resolved against `values`.
    pub fn matrix(&self, values: &[f64]) -> GateMatrix {
        let resolved: Vec<f64> = self.params.iter().map(|p| p.resolve(values)).collect();
        self.gate.matrix(&resolved)
    }

    pub(crate) fn fused(matrix: CMatrix, targets: Vec<usize>) -> Self {
        Self {
            gate: GateKind::Fused(GateMatrix::new_unchecked(matrix)),
            params: Vec::new(),
            targets,
            controls: Vec::new(),
        }
    }
}
