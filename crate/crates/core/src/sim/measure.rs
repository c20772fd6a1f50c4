//! Projective measurement and shot sampling.

use crate::error::{Error, Result};
use crate::linalg::ZERO;
use crate::rng::rng_from_seed;
use crate::sim::state::StateVector;
use rand::Rng;
use std::collections::BTreeMap;
use std::fmt;

/// Counts of observed basis states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotHistogram {
    n_qubits: usize,
    counts: BTreeMap<usize, u64>,
    total_shots: u64,
}

impl ShotHistogram {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn counts(&self) -> &BTreeMap<usize, u64> {
        &self.counts
    }

    pub fn total_shots(&self) -> u64 {
        self.total_shots
    }

    pub fn get(&self, index: usize) -> u64 {
        self.counts.get(&index).copied().unwrap_or(0)
    }

    /// Bit string of `index` with qubit 0 first.
    pub fn bitstring(&self, index: usize) -> String {
        (0..self.n_qubits)
            .map(|q| if index >> q & 1 == 1 { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Display for ShotHistogram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (&index, &count) in &self.counts {
            writeln!(f, "{} {}", self.bitstring(index), count)?;
        }
        Ok(())
    }
}

/// Measures qubit `q` in the Z basis.
///
/// Returns the outcome and the post-measurement state, renormalized.
pub fn measure_qubit(state: &StateVector, q: usize, seed: u64) -> Result<(u8, StateVector)> {
    if q >= state.n_qubits() {
        return Err(Error::validation(format!(
            "qubit {q} out of range for {} qubits",
            state.n_qubits()
        )));
    }
    let p0: f64 = state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(k, _)| k >> q & 1 == 0)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    let total = state.norm_sqr();
    let mut rng = rng_from_seed(seed);
    let draw: f64 = rng.gen::<f64>() * total;
    let outcome = if draw < p0 { 0u8 } else { 1u8 };
    let kept = if outcome == 0 { p0 } else { total - p0 };
    let scale = 1.0 / kept.sqrt();

    let mut collapsed = state.clone();
    for (k, a) in collapsed.amplitudes_mut().iter_mut().enumerate() {
        if (k >> q & 1) as u8 == outcome {
            *a *= scale;
        } else {
            *a = ZERO;
        }
    }
    Ok((outcome, collapsed))
}

/// Draws `shots` independent samples from the `|a_k|²` distribution.
pub fn sample_shots(state: &StateVector, shots: u64, seed: u64) -> Result<ShotHistogram> {
    if shots == 0 {
        return Err(Error::validation("shots must be at least 1"));
    }
    let mut cumulative = Vec::with_capacity(state.len());
    let mut acc = 0.0;
    for a in state.amplitudes() {
        acc += a.norm_sqr();
        cumulative.push(acc);
    }
    let total = acc;

    let mut rng = rng_from_seed(seed);
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        let r = rng.gen::<f64>() * total;
        let mut idx = cumulative.partition_point(|&c| c <= r);
        // Guard against landing past the end through rounding, and skip zero-probability
        // entries that share the same cumulative value.
        idx = idx.min(cumulative.len() - 1);
        while state.amplitudes()[idx].norm_sqr() == 0.0 && idx > 0 {
            idx -= 1;
        }
        *counts.entry(idx).or_insert(0) += 1;
    }
    Ok(ShotHistogram {
        n_qubits: state.n_qubits(),
        counts,
        total_shots: shots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn bell() -> StateVector {
        let s = C64::new(FRAC_1_SQRT_2, 0.0);
        StateVector::from_amplitudes(vec![s, ZERO, ZERO, s]).unwrap()
    }

    #[test]
    fn measuring_one_is_certain() {
        let one = StateVector::basis(1, 1).unwrap();
        for seed in 0..20 {
            let (b, post) = measure_qubit(&one, 0, seed).unwrap();
            assert_eq!(b, 1);
            assert_eq!(post, one);
        }
    }

    #[test]
    fn bell_measurement_collapses_both_qubits() {
        let mut seen = [false; 2];
        for seed in 0..64 {
            let (b, post) = measure_qubit(&bell(), 0, seed).unwrap();
            let idx = if b == 0 { 0b00 } else { 0b11 };
            assert!((post.amplitudes()[idx].norm() - 1.0).abs() < 1e-12);
            assert!((post.norm_sqr() - 1.0).abs() < 1e-12);
            seen[b as usize] = true;
        }
        assert!(seen[0] && seen[1]);
    }

    #[test]
    fn single_qubit_frequency_within_three_sigma() {
        let (alpha, beta) = (0.6f64, 0.8f64);
        let psi =
            StateVector::from_amplitudes(vec![C64::new(alpha, 0.0), C64::new(0.0, beta)]).unwrap();
        let n = 100_000u64;
        let zeros = (0..n)
            .filter(|&seed| measure_qubit(&psi, 0, seed).unwrap().0 == 0)
            .count() as f64;
        let p = alpha * alpha;
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        assert!((zeros - n as f64 * p).abs() < 3.0 * sigma);
    }

    #[test]
    fn basis_state_histogram() {
        let s = StateVector::basis(2, 3).unwrap();
        let h = sample_shots(&s, 100, 1).unwrap();
        assert_eq!(h.counts().len(), 1);
        assert_eq!(h.get(3), 100);
        assert_eq!(h.bitstring(3), "11");
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let a = sample_shots(&bell(), 1000, 7).unwrap();
        let b = sample_shots(&bell(), 1000, 7).unwrap();
        assert_eq!(a, b);
        assert!(sample_shots(&bell(), 0, 7).is_err());
    }

    #[test]
    fn bell_histogram_only_correlated_outcomes() {
        let h = sample_shots(&bell(), 10_000, 3).unwrap();
        assert!(h.counts().keys().all(|&k| k == 0 || k == 3));
        let sigma = (10_000.0f64 * 0.25).sqrt();
        assert!((h.get(0) as f64 - 5000.0).abs() < 3.0 * sigma);
        assert_eq!(h.get(0) + h.get(3), 10_000);
    }
}
