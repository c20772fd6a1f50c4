//! Gate matrices and the standard gate library.

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, I, ONE, ZERO};
use std::f64::consts::FRAC_1_SQRT_2;

/// Unitarity tolerance for `‖G†G − I‖_max`.
pub const UNITARY_TOLERANCE: f64 = 1e-10;

/// A `2^k × 2^k` unitary acting on `k` target qubits.
///
/// Matrix index bit `j` addresses the `j`-th target passed to `apply_gate`.
#[derive(Debug, Clone, PartialEq)]
pub struct GateMatrix {
    arity: usize,
    matrix: CMatrix,
}

impl GateMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let dim = matrix.dim();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::validation(format!(
                "gate matrix dimension {dim} is not a power of two >= 2"
            )));
        }
        let err = matrix.unitarity_error();
        if err.is_nan() || err >= UNITARY_TOLERANCE {
            return Err(Error::validation(format!(
                "gate matrix is not unitary (max deviation {err:e})"
            )));
        }
        Ok(Self {
            arity: dim.trailing_zeros() as usize,
            matrix,
        })
    }

    /// For matrices that are unitary by construction.
    pub(crate) fn new_unchecked(matrix: CMatrix) -> Self {
        debug_assert!(matrix.unitarity_error() < 1e-8);
        Self {
            arity: matrix.dim().trailing_zeros() as usize,
            matrix,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }
}

fn m2(a: C64, b: C64, c: C64, d: C64) -> GateMatrix {
    GateMatrix::new_unchecked(CMatrix::from_rows(2, vec![a, b, c, d]))
}

pub fn identity() -> GateMatrix {
    m2(ONE, ZERO, ZERO, ONE)
}

pub fn x() -> GateMatrix {
    m2(ZERO, ONE, ONE, ZERO)
}

pub fn y() -> GateMatrix {
    m2(ZERO, -I, I, ZERO)
}

pub fn z() -> GateMatrix {
    m2(ONE, ZERO, ZERO, -ONE)
}

pub fn h() -> GateMatrix {
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    m2(s, s, s, -s)
}

pub fn s() -> GateMatrix {
    m2(ONE, ZERO, ZERO, I)
}

pub fn t() -> GateMatrix {
    m2(
        ONE,
        ZERO,
        ZERO,
        C64::from_polar(1.0, std::f64::consts::FRAC_PI_4),
    )
}

/// `diag(1, e^{iλ})`.
pub fn phase(lambda: f64) -> GateMatrix {
    m2(ONE, ZERO, ZERO, C64::from_polar(1.0, lambda))
}

/// `exp(−iθX/2)`.
pub fn rx(theta: f64) -> GateMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    m2(
        C64::new(c, 0.0),
        C64::new(0.0, -s),
        C64::new(0.0, -s),
        C64::new(c, 0.0),
    )
}

/// `exp(−iθY/2) = cos(θ/2) I − i sin(θ/2) Y`.
pub fn ry(theta: f64) -> GateMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    m2(
        C64::new(c, 0.0),
        C64::new(-s, 0.0),
        C64::new(s, 0.0),
        C64::new(c, 0.0),
    )
}

/// `exp(−iθZ/2)`.
pub fn rz(theta: f64) -> GateMatrix {
    m2(
        C64::from_polar(1.0, -theta / 2.0),
        ZERO,
        ZERO,
        C64::from_polar(1.0, theta / 2.0),
    )
}

/// Two-qubit SWAP.
pub fn swap() -> GateMatrix {
    GateMatrix::new_unchecked(CMatrix::from_real_rows(
        4,
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0,
        ],
    ))
}

/// The textbook 4×4 CNOT with rows ordered `|control target⟩`.
///
/// Under the little-endian convention the control is matrix bit 1, so apply it
/// with `targets = [target, control]`. Circuits express CNOT as X with one control.
pub fn cnot() -> GateMatrix {
    GateMatrix::new_unchecked(CMatrix::from_real_rows(
        4,
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            0.0, 0.0, 1.0, 0.0,
        ],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::state::StateVector;

    #[test]
    fn library_gates_are_unitary() {
        let mut all = vec![identity(), x(), y(), z(), h(), s(), t(), swap(), cnot()];
        for k in 0..16 {
            let theta = -3.0 + 0.41 * k as f64;
            all.extend([rx(theta), ry(theta), rz(theta), phase(theta)]);
        }
        for g in all {
            assert!(g.matrix().unitarity_error() < UNITARY_TOLERANCE);
        }
    }

    #[test]
    fn non_unitary_rejected() {
        let m = CMatrix::from_real_rows(2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(GateMatrix::new(m).is_err());
        assert!(GateMatrix::new(CMatrix::identity(3)).is_err());
    }

    #[test]
    fn textbook_cnot_matches_controlled_x() {
        // control 0, target 1 on |q0=1, q1=0> = index 1
        for idx in 0..4 {
            let mut a = StateVector::basis(2, idx).unwrap();
            let mut b = a.clone();
            a.apply_gate(&cnot(), &[1, 0], &[]).unwrap();
            b.apply_gate(&x(), &[1], &[0]).unwrap();
            assert_eq!(a, b);
        }
    }
}
