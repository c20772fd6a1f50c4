#![allow(dead_code)]

use qmlsim::circuit::Param;
use qmlsim::{Circuit, StateVector, C64};
use rand::Rng;

/// Random gate sequence over `n` qubits. The first `slots` rotations each use their own
/// slot; extra `Ry` gates are appended if there were too few rotations.
pub fn random_circuit<R: Rng>(rng: &mut R, n: usize, n_gates: usize, slots: usize) -> Circuit {
    let mut c = Circuit::with_slots(n, slots);
    let mut next_slot = 0;
    for _ in 0..n_gates {
        let q = rng.gen_range(0..n);
        let other = if n > 1 {
            (q + rng.gen_range(1..n)) % n
        } else {
            q
        };
        let angle = |rng: &mut R, next_slot: &mut usize| -> Param {
            if slots > 0 && *next_slot < slots {
                *next_slot += 1;
                Param::slot(*next_slot - 1)
            } else {
                Param::Value(rng.gen_range(-3.2..3.2))
            }
        };
        let pick = rng.gen_range(0..if n > 1 { 10 } else { 7 });
        match pick {
            0 => c.h(q).unwrap(),
            1 => c.x(q).unwrap(),
            2 => c.y(q).unwrap(),
            3 => {
                let a = angle(rng, &mut next_slot);
                c.rx(q, a).unwrap()
            }
            4 => {
                let a = angle(rng, &mut next_slot);
                c.ry(q, a).unwrap()
            }
            5 => {
                let a = angle(rng, &mut next_slot);
                c.rz(q, a).unwrap()
            }
            6 => c.z(q).unwrap(),
            7 => c.cnot(q, other).unwrap(),
            8 => c.cz(q, other).unwrap(),
            _ => c.swap(q, other).unwrap(),
        };
    }
    while next_slot < slots {
        c.ry(rng.gen_range(0..n), Param::slot(next_slot)).unwrap();
        next_slot += 1;
    }
    c
}

pub fn random_state<R: Rng>(rng: &mut R, n: usize) -> StateVector {
    let raw: Vec<C64> = (0..1usize << n)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(raw.into_iter().map(|a| a / norm).collect()).unwrap()
}
