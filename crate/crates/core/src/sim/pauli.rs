//! Pauli strings, weighted sums of them, and exact expectation values.

use crate::error::{Error, Result};
use crate::linalg::{C64, I, ONE};
use crate::sim::state::StateVector;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_char(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// `coeff · P_0 ⊗ P_1 ⊗ …`, letter `i` acting on qubit `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliString {
    pub coeff: f64,
    pub letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(coeff: f64, letters: Vec<Pauli>) -> Self {
        Self { coeff, letters }
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self {
            coeff: 1.0,
            letters: vec![Pauli::I; n_qubits],
        }
    }

    /// Single-qubit `Z` on qubit `q` of an `n`-qubit register.
    pub fn z(n_qubits: usize, q: usize) -> Self {
        let mut letters = vec![Pauli::I; n_qubits];
        letters[q] = Pauli::Z;
        Self {
            coeff: 1.0,
            letters,
        }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    fn masks(&self) -> (usize, usize, u32) {
        let mut flip = 0usize;
        let mut sign = 0usize;
        let mut n_y = 0u32;
        for (q, p) in self.letters.iter().enumerate() {
            match p {
                Pauli::I => {}
                Pauli::X => flip |= 1 << q,
                Pauli::Y => {
                    flip |= 1 << q;
                    sign |= 1 << q;
                    n_y += 1;
                }
                Pauli::Z => sign |= 1 << q,
            }
        }
        (flip, sign, n_y)
    }

    /// `⟨ψ|P|ψ⟩` without the coefficient, as a complex number.
    fn raw_expectation(&self, state: &StateVector) -> C64 {
        // P|k⟩ = i^{n_y} (−1)^{|k ∧ (y|z)|} |k ⊕ (x|y)⟩
        let (flip, sign, n_y) = self.masks();
        let amps = state.amplitudes();
        let mut acc = C64::new(0.0, 0.0);
        for (k, &a) in amps.iter().enumerate() {
            let b = amps[k ^ flip];
            let term = b.conj() * a;
            if (k & sign).count_ones() % 2 == 1 {
                acc -= term;
            } else {
                acc += term;
            }
        }
        let phase = match n_y % 4 {
            0 => ONE,
            1 => I,
            2 => -ONE,
            _ => -I,
        };
        acc * phase
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.letters.iter().map(|p| p.as_char()).collect();
        if self.coeff == 1.0 {
            write!(f, "{s}")
        } else {
            write!(f, "{}*{s}", self.coeff)
        }
    }
}

/// Weighted sum of Pauli strings.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    terms: Vec<PauliString>,
}

impl Observable {
    pub fn new(terms: Vec<PauliString>) -> Result<Self> {
        let Some(first) = terms.first() else {
            return Err(Error::validation("observable has no terms"));
        };
        let width = first.len();
        if width == 0 || terms.iter().any(|t| t.len() != width) {
            return Err(Error::validation(
                "all Pauli strings of an observable must have the same nonzero length",
            ));
        }
        Ok(Self { terms })
    }

    pub fn single(term: PauliString) -> Self {
        Self { terms: vec![term] }
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    pub fn n_qubits(&self) -> usize {
        self.terms[0].len()
    }

    /// Exact expectation value, returning the complex sum so callers can inspect
    /// the imaginary residue.
    pub fn expectation_complex(&self, state: &StateVector) -> Result<C64> {
        if self.n_qubits() != state.n_qubits() {
            return Err(Error::validation(format!(
                "observable acts on {} qubits, state has {}",
                self.n_qubits(),
                state.n_qubits()
            )));
        }
        Ok(self
            .terms
            .iter()
            .map(|t| t.raw_expectation(state) * t.coeff)
            .sum())
    }

    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        Ok(self.expectation_complex(state)?.re)
    }
}

impl FromStr for Observable {
    type Err = Error;

    /// Parses `"ZZ"`, `"0.5*XI + -1*ZZ"` or `"0.5 XI + ZZ"`. Letter `i` acts on qubit `i`.
    fn from_str(s: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for raw in s.split('+') {
            let raw = raw.trim();
            if raw.is_empty() {
                return Err(Error::parse(format!("empty term in observable '{s}'")));
            }
            let (coeff, letters) = match raw.rsplit_once(['*', ' ']) {
                Some((c, l)) => {
                    let c = c.trim();
                    let coeff = c.parse::<f64>().map_err(|_| {
                        Error::parse(format!("bad coefficient '{c}' in observable term '{raw}'"))
                    })?;
                    (coeff, l.trim())
                }
                None => (1.0, raw),
            };
            let letters = letters
                .chars()
                .map(|ch| {
                    Pauli::from_char(ch).ok_or_else(|| {
                        Error::parse(format!("invalid Pauli letter '{ch}' in '{raw}'"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            terms.push(PauliString::new(coeff, letters));
        }
        Observable::new(terms)
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Exact `⟨ψ|O|ψ⟩`.
pub fn expectation_pauli(state: &StateVector, obs: &Observable) -> Result<f64> {
    obs.expectation(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{CMatrix, ZERO};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn single(letter: Pauli) -> CMatrix {
        match letter {
            Pauli::I => CMatrix::identity(2),
            Pauli::X => CMatrix::from_real_rows(2, &[0.0, 1.0, 1.0, 0.0]),
            Pauli::Y => CMatrix::from_rows(2, vec![ZERO, -I, I, ZERO]),
            Pauli::Z => CMatrix::from_real_rows(2, &[1.0, 0.0, 0.0, -1.0]),
        }
    }

    /// Dense `P_{n-1} ⊗ … ⊗ P_0`, so qubit 0 lands on the low bit.
    fn dense(p: &PauliString) -> CMatrix {
        let mut m = CMatrix::identity(1);
        for &l in p.letters.iter().rev() {
            m = m.kron(&single(l));
        }
        m.scale(C64::new(p.coeff, 0.0))
    }

    fn brute_expectation(p: &PauliString, s: &StateVector) -> C64 {
        let v = dense(p).apply(s.amplitudes());
        s.amplitudes()
            .iter()
            .zip(&v)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    #[test]
    fn z_on_single_qubit() {
        let (a, b) = (0.6, 0.8);
        let psi = StateVector::from_amplitudes(vec![C64::new(a, 0.0), C64::new(0.0, b)]).unwrap();
        let z: Observable = "Z".parse().unwrap();
        assert!((z.expectation(&psi).unwrap() - (a * a - b * b)).abs() < 1e-15);

        let plus = StateVector::from_amplitudes(vec![
            C64::new(FRAC_1_SQRT_2, 0.0),
            C64::new(FRAC_1_SQRT_2, 0.0),
        ])
        .unwrap();
        assert!(z.expectation(&plus).unwrap().abs() < 1e-15);
    }

    #[test]
    fn zz_on_bell_is_one() {
        let s = C64::new(FRAC_1_SQRT_2, 0.0);
        let bell = StateVector::from_amplitudes(vec![s, ZERO, ZERO, s]).unwrap();
        let zz: Observable = "ZZ".parse().unwrap();
        let brute = brute_expectation(&zz.terms()[0], &bell);
        assert!((brute - ONE).norm() < 1e-15);
        assert!((zz.expectation(&bell).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn matches_dense_matrix_on_random_states() {
        use rand::Rng;
        let mut rng = crate::rng::rng_from_seed(11);
        let letters = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
        for _ in 0..50 {
            let n = rng.gen_range(1..=3);
            let mut amps: Vec<C64> = (0..1 << n)
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            amps.iter_mut().for_each(|a| *a /= norm);
            let state = StateVector::from_amplitudes(amps).unwrap();
            let p = PauliString::new(
                rng.gen_range(-2.0..2.0),
                (0..n).map(|_| letters[rng.gen_range(0..4)]).collect(),
            );
            let obs = Observable::single(p.clone());
            let fast = obs.expectation_complex(&state).unwrap();
            let brute = brute_expectation(&p, &state);
            assert!((fast - brute).norm() < 1e-12);
            assert!(fast.im.abs() < 1e-10);
        }
    }

    #[test]
    fn parse_weighted_sum() {
        let o: Observable = "0.5*XI + -1 ZZ".parse().unwrap();
        assert_eq!(o.terms().len(), 2);
        assert_eq!(o.terms()[0].coeff, 0.5);
        assert_eq!(o.terms()[1].letters, vec![Pauli::Z, Pauli::Z]);
        assert!("ZQ".parse::<Observable>().is_err());
        assert!("Z + ZZ".parse::<Observable>().is_err());
    }

    #[test]
    fn width_mismatch_is_validation_error() {
        let z: Observable = "ZZ".parse().unwrap();
        let s = StateVector::zero(3).unwrap();
        assert!(matches!(z.expectation(&s), Err(Error::Validation(_))));
    }
}
