//! Classical data to quantum states: basis, angle and amplitude encoding.
//!
//! Bit `i` of an input string, or feature `i` of a vector, lands on qubit `i`.

use crate::circuit::{Circuit, GateKind, Param};
use crate::error::{Error, Result};
use crate::linalg::{C64, ZERO};
use crate::sim::state::StateVector;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::f64::consts::{PI, TAU};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncodingMethod {
    Basis,
    Angle,
    Amplitude,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    #[default]
    Y,
    Z,
}

impl Axis {
    fn gate(self) -> GateKind {
        match self {
            Axis::X => GateKind::Rx,
            Axis::Y => GateKind::Ry,
            Axis::Z => GateKind::Rz,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EncodingSpec {
    pub method: EncodingMethod,
    #[serde(default)]
    pub axis: Axis,
    #[serde(default = "default_range")]
    pub target_range: (f64, f64),
}

fn default_range() -> (f64, f64) {
    (0.0, PI)
}

impl EncodingSpec {
    pub fn basis() -> Self {
        Self {
            method: EncodingMethod::Basis,
            axis: Axis::Y,
            target_range: default_range(),
        }
    }

    pub fn angle(axis: Axis) -> Self {
        Self {
            method: EncodingMethod::Angle,
            axis,
            target_range: default_range(),
        }
    }

    pub fn amplitude() -> Self {
        Self {
            method: EncodingMethod::Amplitude,
            axis: Axis::Y,
            target_range: default_range(),
        }
    }

    pub fn with_range(mut self, lo: f64, hi: f64) -> Self {
        self.target_range = (lo, hi);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.target_range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::validation(format!(
                "angle range [{lo}, {hi}] must satisfy lo < hi"
            )));
        }
        if hi - lo > TAU + 1e-12 {
            return Err(Error::validation(format!(
                "angle range [{lo}, {hi}] is wider than 2π"
            )));
        }
        Ok(())
    }

    /// Encodes one feature vector into a state starting from `|0…0⟩`.
    ///
    /// Angle features are taken as already-normalized angles.
    pub fn encode_state(&self, features: &[f64]) -> Result<StateVector> {
        match self.method {
            EncodingMethod::Basis => {
                let bits = features
                    .iter()
                    .map(|&f| {
                        if f == 0.0 {
                            Ok(0u8)
                        } else if f == 1.0 {
                            Ok(1u8)
                        } else {
                            Err(Error::validation(format!(
                                "basis feature {f} is not 0 or 1"
                            )))
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                run_from_zero(&basis_encode(&bits)?)
            }
            EncodingMethod::Angle => run_from_zero(&angle_encode(features, self)?),
            EncodingMethod::Amplitude => {
                let x: Vec<C64> = features.iter().map(|&f| C64::new(f, 0.0)).collect();
                run_from_zero(&amplitude_encode(&x)?.0)
            }
        }
    }
}

fn run_from_zero(c: &Circuit) -> Result<StateVector> {
    c.execute(&StateVector::zero(c.n_qubits())?)
}

/// What a normalization did, so it can be undone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationRecord {
    pub min: f64,
    pub max: f64,
    /// L2 norm of the raw amplitude vector (amplitude encoding only, else 0).
    pub l2_norm: f64,
    /// Zeros appended to reach a power-of-two length.
    pub pad_length: usize,
    /// Phase removed so the first nonzero amplitude is real and nonnegative.
    pub global_phase: f64,
    pub target_range: (f64, f64),
}

impl NormalizationRecord {
    /// Inverts [`angle_normalize`]. Degenerate (constant) inputs map back to `min`.
    pub fn invert_angles(&self, angles: &[f64]) -> Vec<f64> {
        let (lo, hi) = self.target_range;
        let span = self.max - self.min;
        angles
            .iter()
            .map(|&a| self.min + (a - lo) * span / (hi - lo))
            .collect()
    }

    /// Recovers the raw vector from the first `n` amplitudes of an encoded state.
    pub fn invert_amplitudes(&self, amps: &[C64], n: usize) -> Vec<C64> {
        let factor = C64::from_polar(self.l2_norm, self.global_phase);
        amps[..n].iter().map(|&a| a * factor).collect()
    }
}

/// X on every qubit whose bit is 1.
pub fn basis_encode(bits: &[u8]) -> Result<Circuit> {
    if bits.is_empty() {
        return Err(Error::validation("cannot basis-encode an empty bit string"));
    }
    let mut c = Circuit::new(bits.len());
    for (q, &b) in bits.iter().enumerate() {
        match b {
            0 => {}
            1 => {
                c.x(q)?;
            }
            other => return Err(Error::validation(format!("bit {q} is {other}, not 0 or 1"))),
        }
    }
    Ok(c)
}

/// Basis-state index of a bit string, bit `i` on qubit `i`.
pub fn bits_to_index(bits: &[u8]) -> usize {
    bits.iter()
        .enumerate()
        .fold(0, |acc, (q, &b)| acc | ((b as usize & 1) << q))
}

fn dataset_vector(data: &[Vec<u8>]) -> Result<Vec<C64>> {
    let Some(first) = data.first() else {
        return Err(Error::validation("dataset is empty"));
    };
    let width = first.len();
    if width == 0 {
        return Err(Error::validation("dataset strings are empty"));
    }
    let mut seen = HashSet::new();
    for (m, s) in data.iter().enumerate() {
        if s.len() != width {
            return Err(Error::validation(format!(
                "string {m} has length {}, expected {width}",
                s.len()
            )));
        }
        if s.iter().any(|&b| b > 1) {
            return Err(Error::validation(format!("string {m} is not binary")));
        }
        if !seen.insert(s.clone()) {
            return Err(Error::validation(format!(
                "duplicate string at position {m}; amplitudes would not be uniform"
            )));
        }
    }
    let amp = C64::new(1.0 / (data.len() as f64).sqrt(), 0.0);
    let mut v = vec![ZERO; 1 << width];
    for s in data {
        v[bits_to_index(s)] = amp;
    }
    Ok(v)
}

/// Uniform superposition `(1/√M) Σ_m |x^m⟩` over distinct bit strings.
pub fn basis_encode_dataset(data: &[Vec<u8>]) -> Result<StateVector> {
    StateVector::from_amplitudes(dataset_vector(data)?)
}

/// Circuit preparing [`basis_encode_dataset`]'s state from `|0…0⟩`.
///
/// X gates alone only reach single basis states, so this goes through amplitude encoding.
pub fn basis_encode_dataset_circuit(data: &[Vec<u8>]) -> Result<Circuit> {
    Ok(amplitude_encode(&dataset_vector(data)?)?.0)
}

/// Affine map of `x` onto `spec.target_range`; a constant vector maps to `lo`.
pub fn angle_normalize(x: &[f64], spec: &EncodingSpec) -> Result<(Vec<f64>, NormalizationRecord)> {
    spec.validate()?;
    if x.is_empty() {
        return Err(Error::validation("cannot normalize an empty vector"));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::validation("features must be finite"));
    }
    let (lo, hi) = spec.target_range;
    let min = x.iter().copied().fold(f64::INFINITY, f64::min);
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let angles = if max > min {
        x.iter()
            .map(|&v| lo + (hi - lo) * (v - min) / (max - min))
            .collect()
    } else {
        vec![lo; x.len()]
    };
    Ok((
        angles,
        NormalizationRecord {
            min,
            max,
            l2_norm: 0.0,
            pad_length: 0,
            global_phase: 0.0,
            target_range: spec.target_range,
        },
    ))
}

/// One rotation about `spec.axis` per feature, feature `i` on qubit `i`.
pub fn angle_encode(angles: &[f64], spec: &EncodingSpec) -> Result<Circuit> {
    if angles.is_empty() {
        return Err(Error::validation("cannot angle-encode an empty vector"));
    }
    let gate = spec.axis.gate();
    let mut c = Circuit::new(angles.len());
    for (q, &a) in angles.iter().enumerate() {
        if !a.is_finite() {
            return Err(Error::validation(format!("angle {q} is not finite")));
        }
        c.gate(gate.clone(), &[q], &[], &[Param::Value(a)])?;
    }
    Ok(c)
}

const ANGLE_EPS: f64 = 1e-15;

/// State-preparation circuit for `x / ‖x‖₂`, zero-padded to a power of two.
///
/// Magnitudes come from a binary tree of uniformly controlled Ry rotations (most
/// significant qubit first), phases from a tree of uniformly controlled Rz rotations
/// (least significant qubit first), followed by a global-phase correction so the
/// first nonzero amplitude is real and nonnegative. Each uniformly controlled
/// rotation on `l` controls expands into `2^l` rotations and `2^l` CNOTs, so the
/// circuit has O(2^n) gates.
pub fn amplitude_encode(x: &[C64]) -> Result<(Circuit, NormalizationRecord)> {
    if x.is_empty() {
        return Err(Error::validation("cannot amplitude-encode an empty vector"));
    }
    if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::validation("amplitudes must be finite"));
    }
    let norm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::validation("cannot amplitude-encode the zero vector"));
    }
    let n_qubits = (x.len().next_power_of_two().trailing_zeros() as usize).max(1);
    let len = 1usize << n_qubits;
    let first_phase = x
        .iter()
        .find(|v| v.norm() > 0.0)
        .map(|v| v.arg())
        .unwrap_or(0.0);
    let rotate = C64::from_polar(1.0 / norm, -first_phase);

    let mut target = vec![ZERO; len];
    for (t, &v) in target.iter_mut().zip(x) {
        *t = v * rotate;
    }
    let mags: Vec<f64> = target.iter().map(|v| v.norm()).collect();
    let phases: Vec<f64> = target
        .iter()
        .map(|v| if v.norm() > 0.0 { v.arg() } else { 0.0 })
        .collect();

    let mut c = Circuit::new(n_qubits);

    // magnitudes, top qubit first
    for level in 0..n_qubits {
        let t = n_qubits - 1 - level;
        let controls: Vec<usize> = (t + 1..n_qubits).collect();
        let block = |p: usize, bit: usize| -> f64 {
            let start = (p << (t + 1)) | (bit << t);
            mags[start..start + (1 << t)]
                .iter()
                .map(|m| m * m)
                .sum::<f64>()
                .sqrt()
        };
        let angles: Vec<f64> = (0..1usize << level)
            .map(|p| 2.0 * block(p, 1).atan2(block(p, 0)))
            .collect();
        uniformly_controlled(&mut c, GateKind::Ry, t, &controls, &angles)?;
    }

    // phases, bottom qubit first; each level passes pair averages upward
    let mut level_phases = phases;
    for t in 0..n_qubits {
        let controls: Vec<usize> = (t + 1..n_qubits).collect();
        let pairs = level_phases.len() / 2;
        let diffs: Vec<f64> = (0..pairs)
            .map(|p| level_phases[2 * p + 1] - level_phases[2 * p])
            .collect();
        uniformly_controlled(&mut c, GateKind::Rz, t, &controls, &diffs)?;
        level_phases = (0..pairs)
            .map(|p| 0.5 * (level_phases[2 * p] + level_phases[2 * p + 1]))
            .collect();
    }
    let global = level_phases[0];
    if global.abs() > ANGLE_EPS {
        // e^{iγ} on both branches of qubit 0
        c.phase(0, global)?.x(0)?.phase(0, global)?.x(0)?;
    }

    Ok((
        c,
        NormalizationRecord {
            min: 0.0,
            max: 0.0,
            l2_norm: norm,
            pad_length: len - x.len(),
            global_phase: first_phase,
            target_range: (0.0, 0.0),
        },
    ))
}

/// Applies `R(angles[p])` to `target` when the controls read `p`
/// (bit `j` of `p` is `controls[j]`), using the Gray-code CNOT ladder.
fn uniformly_controlled(
    c: &mut Circuit,
    gate: GateKind,
    target: usize,
    controls: &[usize],
    angles: &[f64],
) -> Result<()> {
    debug_assert_eq!(angles.len(), 1 << controls.len());
    if angles.iter().all(|a| a.abs() < ANGLE_EPS) {
        return Ok(());
    }
    if controls.is_empty() {
        c.gate(gate, &[target], &[], &[Param::Value(angles[0])])?;
        return Ok(());
    }
    let m = angles.len();
    let gray = |j: usize| j ^ (j >> 1);
    let scale = 1.0 / m as f64;
    for j in 0..m {
        let theta: f64 = angles
            .iter()
            .enumerate()
            .map(|(p, &a)| {
                if (p & gray(j)).count_ones() % 2 == 0 {
                    a
                } else {
                    -a
                }
            })
            .sum::<f64>()
            * scale;
        if theta.abs() > ANGLE_EPS {
            c.gate(gate.clone(), &[target], &[], &[Param::Value(theta)])?;
        }
        let changed = gray(j) ^ gray((j + 1) % m);
        let bit = changed.trailing_zeros() as usize;
        c.cnot(controls[bit], target)?;
    }
    Ok(())
}
