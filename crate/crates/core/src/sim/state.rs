use crate::error::{Error, Result};
use crate::linalg::{C64, ONE, ZERO};
use crate::sim::gates::GateMatrix;
use crate::sim::kernel::{self, Parallelism};

/// Largest register accepted unless a caller asks for more.
pub const DEFAULT_MAX_QUBITS: usize = 26;

/// Tolerance on `Σ|a_k|² = 1` for stored states.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Complex amplitude.
pub type Amplitude = C64;

/// Dense `2^n` amplitude vector. Qubit `q` is bit `q` of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Amplitude>,
}

impl StateVector {
    /// `|0…0⟩` on `n_qubits` qubits, capped at [`DEFAULT_MAX_QUBITS`].
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::zero_with_limit(n_qubits, DEFAULT_MAX_QUBITS)
    }

    pub fn zero_with_limit(n_qubits: usize, max_qubits: usize) -> Result<Self> {
        Self::basis_with_limit(n_qubits, 0, max_qubits)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        Self::basis_with_limit(n_qubits, index, DEFAULT_MAX_QUBITS)
    }

    fn basis_with_limit(n_qubits: usize, index: usize, max_qubits: usize) -> Result<Self> {
        check_capacity(n_qubits, max_qubits)?;
        let len = 1usize << n_qubits;
        if index >= len {
            return Err(Error::validation(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amps = vec![ZERO; len];
        amps[index] = ONE;
        Ok(Self { n_qubits, amps })
    }

    /// Wraps an amplitude vector, checking length, finiteness and normalization.
    pub fn from_amplitudes(amps: Vec<Amplitude>) -> Result<Self> {
        let state = Self::from_amplitudes_unnormalized(amps)?;
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::validation(format!(
                "state is not normalized: sum of |a|^2 = {norm}"
            )));
        }
        Ok(state)
    }

    pub(crate) fn from_amplitudes_unnormalized(amps: Vec<Amplitude>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::validation(format!(
                "amplitude vector length {len} is not a power of two >= 2"
            )));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::validation("amplitudes must be finite"));
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_capacity(n_qubits, DEFAULT_MAX_QUBITS)?;
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Amplitude] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Amplitude> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Applies `gate` to `targets`, conditioned on all `controls` being |1⟩.
    pub fn apply_gate(
        &mut self,
        gate: &GateMatrix,
        targets: &[usize],
        controls: &[usize],
    ) -> Result<()> {
        self.apply_gate_with(gate, targets, controls, Parallelism::Auto)
    }

    pub fn apply_gate_with(
        &mut self,
        gate: &GateMatrix,
        targets: &[usize],
        controls: &[usize],
        parallelism: Parallelism,
    ) -> Result<()> {
        if gate.arity() != targets.len() {
            return Err(Error::validation(format!(
                "gate arity {} does not match {} targets",
                gate.arity(),
                targets.len()
            )));
        }
        validate_qubits(self.n_qubits, targets, controls)?;
        kernel::apply_matrix(
            &mut self.amps,
            self.n_qubits,
            gate.matrix(),
            targets,
            controls,
            parallelism,
        );
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn inner_product(&self, other: &StateVector) -> Result<Amplitude> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::validation(format!(
                "inner product of {}-qubit and {}-qubit states",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner_product(other)?.norm_sqr())
    }
}

fn check_capacity(n_qubits: usize, max_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > max_qubits {
        return Err(Error::Capacity(format!(
            "{n_qubits} qubits outside supported range 1..={max_qubits}"
        )));
    }
    Ok(())
}

/// Checks that all indices are in range and that targets and controls are disjoint.
pub(crate) fn validate_qubits(
    n_qubits: usize,
    targets: &[usize],
    controls: &[usize],
) -> Result<()> {
    let mut seen = 0u64;
    for &q in targets.iter().chain(controls) {
        if q >= n_qubits {
            return Err(Error::validation(format!(
                "qubit index {q} out of range for {n_qubits} qubits"
            )));
        }
        if seen >> q & 1 == 1 {
            return Err(Error::validation(format!("qubit {q} used more than once")));
        }
        seen |= 1 << q;
    }
    Ok(())
}

/// `|0…0⟩` with the default capacity.
pub fn new_zero_state(n_qubits: usize) -> Result<StateVector> {
    StateVector::zero(n_qubits)
}

/// `⟨a|b⟩`.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<Amplitude> {
    a.inner_product(b)
}
