//! Amplitude-stride kernels for applying a (controlled) k-qubit matrix.
//!
//! Qubit `q` is bit `q` of the basis index (little-endian). Matrix index bit `j`
//! corresponds to `targets[j]`.

use crate::linalg::{CMatrix, C64};
use rayon::prelude::*;

/// States at or above this size are split across the rayon pool.
const PARALLEL_MIN_QUBITS: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    /// Always sweep on the calling thread.
    Sequential,
    /// Split large sweeps over the current rayon pool.
    #[default]
    Auto,
}

#[derive(Clone, Copy)]
struct AmpPtr(*mut C64);

// SAFETY: every base index addresses a disjoint set of amplitudes, so concurrent
// writers never alias.
unsafe impl Send for AmpPtr {}
unsafe impl Sync for AmpPtr {}

impl AmpPtr {
    fn get(self) -> *mut C64 {
        self.0
    }
}

/// Inserts a zero bit at each of `sorted_positions` (ascending) into `value`.
#[inline]
fn deposit(mut value: usize, sorted_positions: &[usize]) -> usize {
    for &pos in sorted_positions {
        let low = value & ((1usize << pos) - 1);
        value = ((value >> pos) << (pos + 1)) | low;
    }
    value
}

struct Plan {
    fixed: Vec<usize>,
    control_mask: usize,
    offsets: Vec<usize>,
    count: usize,
}

impl Plan {
    fn new(n_qubits: usize, targets: &[usize], controls: &[usize]) -> Self {
        let mut fixed: Vec<usize> = targets.iter().chain(controls).copied().collect();
        fixed.sort_unstable();
        let control_mask = controls.iter().fold(0usize, |m, &c| m | (1 << c));
        let offsets = (0..1usize << targets.len())
            .map(|j| {
                targets
                    .iter()
                    .enumerate()
                    .filter(|(bit, _)| j >> bit & 1 == 1)
                    .fold(0usize, |acc, (_, &t)| acc | (1 << t))
            })
            .collect();
        let count = 1usize << (n_qubits - fixed.len());
        Self {
            fixed,
            control_mask,
            offsets,
            count,
        }
    }

    #[inline]
    fn base(&self, b: usize) -> usize {
        deposit(b, &self.fixed) | self.control_mask
    }
}

/// Applies `matrix` on `targets`, conditioned on every qubit in `controls` being 1.
///
/// Callers are responsible for validating indices; this only asserts shapes.
pub fn apply_matrix(
    amps: &mut [C64],
    n_qubits: usize,
    matrix: &CMatrix,
    targets: &[usize],
    controls: &[usize],
    parallelism: Parallelism,
) {
    debug_assert_eq!(amps.len(), 1 << n_qubits);
    debug_assert_eq!(matrix.dim(), 1 << targets.len());
    let plan = Plan::new(n_qubits, targets, controls);
    let parallel = parallelism == Parallelism::Auto
        && n_qubits >= PARALLEL_MIN_QUBITS
        && rayon::current_num_threads() > 1;

    if targets.len() == 1 {
        let m = [
            matrix.get(0, 0),
            matrix.get(0, 1),
            matrix.get(1, 0),
            matrix.get(1, 1),
        ];
        let stride = plan.offsets[1];
        let kernel = |ptr: *mut C64, b: usize| {
            let i0 = plan.base(b);
            let i1 = i0 | stride;
            // SAFETY: i0 and i1 are owned by base index b only.
            unsafe {
                let a0 = *ptr.add(i0);
                let a1 = *ptr.add(i1);
                *ptr.add(i0) = m[0] * a0 + m[1] * a1;
                *ptr.add(i1) = m[2] * a0 + m[3] * a1;
            }
        };
        run(amps, plan.count, parallel, kernel);
        return;
    }

    let dim = plan.offsets.len();
    let kernel = |ptr: *mut C64, b: usize| {
        let base = plan.base(b);
        let mut gathered = [C64::new(0.0, 0.0); 64];
        let mut scratch: Vec<C64>;
        let buf: &mut [C64] = if dim <= 64 {
            &mut gathered[..dim]
        } else {
            scratch = vec![C64::new(0.0, 0.0); dim];
            &mut scratch[..]
        };
        // SAFETY: base + offsets[j] are disjoint across base indices.
        unsafe {
            for (j, &off) in plan.offsets.iter().enumerate() {
                buf[j] = *ptr.add(base + off);
            }
            let data = matrix.data();
            for (r, &off) in plan.offsets.iter().enumerate() {
                let row = &data[r * dim..(r + 1) * dim];
                let mut acc = C64::new(0.0, 0.0);
                for (a, v) in row.iter().zip(buf.iter()) {
                    acc += a * v;
                }
                *ptr.add(base + off) = acc;
            }
        }
    };
    run(amps, plan.count, parallel, kernel);
}

fn run<F>(amps: &mut [C64], count: usize, parallel: bool, kernel: F)
where
    F: Fn(*mut C64, usize) + Sync + Send,
{
    let ptr = AmpPtr(amps.as_mut_ptr());
    if parallel {
        (0..count)
            .into_par_iter()
            .with_min_len(1 << 10)
            .for_each(|b| kernel(ptr.get(), b));
    } else {
        let raw = ptr.get();
        for b in 0..count {
            kernel(raw, b);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deposit_inserts_zero_bits() {
        // 0b111 with a hole at bit 1 -> 0b1101
        assert_eq!(deposit(0b111, &[1]), 0b1101);
        assert_eq!(deposit(0b11, &[0, 2]), 0b1010);
    }
}
