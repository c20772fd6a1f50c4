use super::cost::CostSpec;
use crate::circuit::{Circuit, Param};
use crate::error::{Error, Result};
use crate::sim::state::StateVector;
use rayon::prelude::*;
use std::f64::consts::FRAC_PI_2;

#[derive(Debug, Clone, PartialEq)]
pub struct GradientResult {
    pub grad: Vec<f64>,
    /// Observable evaluations spent: two shifted circuits per slot occurrence, each
    /// measured against every observable.
    pub circuit_evaluations: usize,
}

/// One place where a slot feeds a gate angle.
#[derive(Debug, Clone, Copy)]
struct Occurrence {
    op: usize,
    slot: usize,
    scale: f64,
}

fn occurrences(ansatz: &Circuit) -> Result<Vec<Occurrence>> {
    let mut out = Vec::new();
    for (i, op) in ansatz.ops().iter().enumerate() {
        for p in &op.params {
            if let Param::Slot { index, scale } = *p {
                if !op.gate.is_pauli_rotation() || !op.controls.is_empty() {
                    let kind = if op.controls.is_empty() {
                        op.gate.name().to_string()
                    } else {
                        format!("controlled {}", op.gate.name())
                    };
                    return Err(Error::UnsupportedGate(format!(
                        "ops[{i}] is a {kind}; only uncontrolled rx/ry/rz have ±1/2 generators"
                    )));
                }
                out.push(Occurrence {
                    op: i,
                    slot: index,
                    scale,
                });
            }
        }
    }
    Ok(out)
}

fn shifted(bound: &Circuit, op: usize, delta: f64) -> Circuit {
    let mut ops = bound.ops().to_vec();
    if let Param::Value(v) = &mut ops[op].params[0] {
        *v += delta;
    }
    Circuit::from_validated(bound.n_qubits(), 0, ops)
}

/// `∂e_o/∂θ_s` for every observable `o` and slot `s`, plus the evaluation count.
pub(crate) fn expectation_jacobian(
    spec: &CostSpec,
    params: &[f64],
    input: &StateVector,
) -> Result<(Vec<Vec<f64>>, usize)> {
    spec.check_params(params)?;
    let occ = occurrences(&spec.ansatz)?;
    let bound = spec.ansatz.bind_parameters(params)?;
    let n_obs = spec.observables.len();

    // Each occurrence is shifted on its own gate angle by ±π/2; the slot derivative
    // is the sum over occurrences, weighted by the slot scale.
    let per_occ: Vec<Vec<f64>> = occ
        .par_iter()
        .map(|o| {
            let plus = spec.expectations_bound(&shifted(&bound, o.op, FRAC_PI_2), input)?;
            let minus = spec.expectations_bound(&shifted(&bound, o.op, -FRAC_PI_2), input)?;
            Ok(plus
                .iter()
                .zip(&minus)
                .map(|(p, m)| o.scale * (p - m) / 2.0)
                .collect())
        })
        .collect::<Result<_>>()?;

    let mut jac = vec![vec![0.0; spec.n_slots()]; n_obs];
    for (o, d) in occ.iter().zip(&per_occ) {
        for (row, v) in jac.iter_mut().zip(d) {
            row[o.slot] += v;
        }
    }
    Ok((jac, 2 * occ.len() * n_obs))
}

/// Parameter-shift gradient of [`evaluate_cost`](super::evaluate_cost).
///
/// Every slot must feed only uncontrolled Pauli rotations. When each slot appears in a
/// single gate the evaluation count is exactly `2 · n_slots · n_observables`.
pub fn parameter_shift_gradient(
    spec: &CostSpec,
    params: &[f64],
    input: &StateVector,
    label: Option<f64>,
) -> Result<GradientResult> {
    let (_, grad, evals) = value_and_gradient(spec, params, input, label)?;
    Ok(GradientResult {
        grad,
        circuit_evaluations: evals,
    })
}

/// Expectations at `params`, the chain-ruled cost gradient and the evaluation count.
pub(crate) fn value_and_gradient(
    spec: &CostSpec,
    params: &[f64],
    input: &StateVector,
    label: Option<f64>,
) -> Result<(Vec<f64>, Vec<f64>, usize)> {
    let e = spec.expectations(params, input)?;
    let df = spec.postproc.gradient(&e, label)?;
    let (jac, evals) = expectation_jacobian(spec, params, input)?;
    let grad = (0..spec.n_slots())
        .map(|s| df.iter().zip(&jac).map(|(w, row)| w * row[s]).sum())
        .collect();
    Ok((e, grad, evals))
}
