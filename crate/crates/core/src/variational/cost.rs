use crate::circuit::{self, Circuit};
use crate::error::{Error, Result};
use crate::sim::kernel::Parallelism;
use crate::sim::pauli::Observable;
use crate::sim::state::StateVector;
use serde::{Deserialize, Serialize};

/// Classical reduction applied to the vector of observable expectations.
///
/// `m` below is the mean of the expectations, `y` the label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PostProcess {
    /// Sum of the expectations.
    Identity,
    /// `m`.
    Mean,
    /// `(m − y)²`; labels are targets in [−1, 1].
    MseVsLabel,
    /// Binary cross-entropy of `p = (1 − m)/2` against `y ∈ {0, 1}`.
    CrossEntropyVsLabel,
}

const PROB_CLAMP: f64 = 1e-12;

impl PostProcess {
    pub fn needs_label(self) -> bool {
        matches!(
            self,
            PostProcess::MseVsLabel | PostProcess::CrossEntropyVsLabel
        )
    }

    fn check_label(self, label: Option<f64>) -> Result<f64> {
        match (self.needs_label(), label) {
            (true, Some(y)) if y.is_finite() => Ok(y),
            (true, Some(y)) => Err(Error::validation(format!("label {y} is not finite"))),
            (true, None) => Err(Error::validation(
                "post-processing requires a label but none was given",
            )),
            (false, Some(_)) => Err(Error::validation(
                "post-processing takes no label but one was given",
            )),
            (false, None) => Ok(0.0),
        }
    }

    fn probability(m: f64) -> f64 {
        ((1.0 - m) / 2.0).clamp(PROB_CLAMP, 1.0 - PROB_CLAMP)
    }

    pub fn apply(self, expectations: &[f64], label: Option<f64>) -> Result<f64> {
        let y = self.check_label(label)?;
        let m = mean(expectations);
        Ok(match self {
            PostProcess::Identity => expectations.iter().sum(),
            PostProcess::Mean => m,
            PostProcess::MseVsLabel => (m - y).powi(2),
            PostProcess::CrossEntropyVsLabel => {
                let p = Self::probability(m);
                -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
            }
        })
    }

    /// `∂f/∂e_o` for each expectation.
    pub fn gradient(self, expectations: &[f64], label: Option<f64>) -> Result<Vec<f64>> {
        let y = self.check_label(label)?;
        let k = expectations.len() as f64;
        let m = mean(expectations);
        let dm = match self {
            PostProcess::Identity => return Ok(vec![1.0; expectations.len()]),
            PostProcess::Mean => 1.0,
            PostProcess::MseVsLabel => 2.0 * (m - y),
            PostProcess::CrossEntropyVsLabel => {
                let raw = (1.0 - m) / 2.0;
                if !(PROB_CLAMP..=1.0 - PROB_CLAMP).contains(&raw) {
                    // the clamped loss is flat here
                    0.0
                } else {
                    let dp = -y / raw + (1.0 - y) / (1.0 - raw);
                    -0.5 * dp
                }
            }
        };
        Ok(vec![dm / k; expectations.len()])
    }

    /// Whether the prediction from `expectations` matches the label.
    ///
    /// MSE predicts `sign(m)`, cross-entropy predicts class 1 when `p > 1/2`.
    pub fn is_correct(self, expectations: &[f64], label: f64) -> Option<bool> {
        let m = mean(expectations);
        match self {
            PostProcess::MseVsLabel => Some((m >= 0.0) == (label >= 0.0)),
            PostProcess::CrossEntropyVsLabel => Some((Self::probability(m) > 0.5) == (label > 0.5)),
            _ => None,
        }
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Ansatz, observables and the reduction that turns expectations into a cost.
#[derive(Debug, Clone, PartialEq)]
pub struct CostSpec {
    pub ansatz: Circuit,
    pub observables: Vec<Observable>,
    pub postproc: PostProcess,
}

impl CostSpec {
    pub fn new(
        ansatz: Circuit,
        observables: Vec<Observable>,
        postproc: PostProcess,
    ) -> Result<Self> {
        if observables.is_empty() {
            return Err(Error::validation("cost needs at least one observable"));
        }
        if let Some(o) = observables
            .iter()
            .find(|o| o.n_qubits() != ansatz.n_qubits())
        {
            return Err(Error::validation(format!(
                "observable '{o}' has width {}, ansatz has {} qubits",
                o.n_qubits(),
                ansatz.n_qubits()
            )));
        }
        Ok(Self {
            ansatz,
            observables,
            postproc,
        })
    }

    pub fn n_slots(&self) -> usize {
        self.ansatz.n_slots()
    }

    pub(crate) fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_slots() {
            return Err(Error::validation(format!(
                "ansatz has {} slot(s), got {} parameter(s)",
                self.n_slots(),
                params.len()
            )));
        }
        Ok(())
    }

    /// Expectation of every observable on `U(θ)|input⟩`.
    pub fn expectations(&self, params: &[f64], input: &StateVector) -> Result<Vec<f64>> {
        self.check_params(params)?;
        let bound = self.ansatz.bind_parameters(params)?;
        self.expectations_bound(&bound, input)
    }

    pub(crate) fn expectations_bound(
        &self,
        bound: &Circuit,
        input: &StateVector,
    ) -> Result<Vec<f64>> {
        let mut state = input.clone();
        circuit::execute_in_place(bound, &mut state, None, Parallelism::Sequential)?;
        self.observables
            .iter()
            .map(|o| o.expectation(&state))
            .collect()
    }
}

/// `f(⟨input|U†(θ) O U(θ)|input⟩)` computed exactly.
pub fn evaluate_cost(
    spec: &CostSpec,
    params: &[f64],
    input: &StateVector,
    label: Option<f64>,
) -> Result<f64> {
    let e = spec.expectations(params, input)?;
    spec.postproc.apply(&e, label)
}
