use crate::circuit::{self, Circuit};
use crate::error::{Error, Result};
use crate::sim::kernel::Parallelism;
use crate::sim::pauli::{Observable, PauliString};
use crate::sim::state::StateVector;

/// Builds the ancilla circuit whose ancilla `⟨Z⟩` equals `Re⟨a|b⟩`.
///
/// The ancilla is qubit `n`. After `H`, the ancilla-0 branch runs `prep_a` and the
/// ancilla-1 branch runs `prep_b`; a final `H` interferes the two branches.
pub fn hadamard_test_circuit(prep_a: &Circuit, prep_b: &Circuit) -> Result<Circuit> {
    let n = prep_a.n_qubits();
    if prep_b.n_qubits() != n {
        return Err(Error::validation(format!(
            "preparations act on {} and {} qubits",
            n,
            prep_b.n_qubits()
        )));
    }
    if !prep_a.is_bound() || !prep_b.is_bound() {
        return Err(Error::validation("hadamard test needs bound preparations"));
    }
    let anc = n;
    let mut c = Circuit::new(n + 1);
    c.h(anc)?.x(anc)?;
    c.append(&prep_a.controlled_on(n + 1, &[anc])?)?;
    c.x(anc)?;
    c.append(&prep_b.controlled_on(n + 1, &[anc])?)?;
    c.h(anc)?;
    Ok(c)
}

/// `Re⟨a|b⟩` for `|a⟩ = A|0…0⟩`, `|b⟩ = B|0…0⟩`, read off an ancilla.
pub fn hadamard_test(prep_a: &Circuit, prep_b: &Circuit) -> Result<f64> {
    let c = hadamard_test_circuit(prep_a, prep_b)?;
    let mut state = StateVector::zero(c.n_qubits())?;
    circuit::execute_in_place(&c, &mut state, None, Parallelism::Auto)?;
    let z = PauliString::z(c.n_qubits(), c.n_qubits() - 1);
    Observable::single(z).expectation(&state)
}
