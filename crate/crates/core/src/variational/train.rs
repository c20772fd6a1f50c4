//! Full-batch hybrid training loop.

use super::cost::CostSpec;
use super::gradient::value_and_gradient;
use crate::encoding::EncodingSpec;
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use crate::sim::state::StateVector;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Optimizer {
    Sgd,
    Adam,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Init {
    Zeros,
    /// Uniform in [−0.1, 0.1].
    UniformSmall,
}

const SMALL_INIT: f64 = 0.1;
const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub optimizer: Optimizer,
    pub seed: u64,
    pub init: Init,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            epochs: 50,
            optimizer: Optimizer::Adam,
            seed: 0,
            init: Init::UniformSmall,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::validation(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.epochs == 0 {
            return Err(Error::validation("epochs must be at least 1"));
        }
        Ok(())
    }

    pub fn initial_params(&self, n: usize) -> Vec<f64> {
        match self.init {
            Init::Zeros => vec![0.0; n],
            Init::UniformSmall => {
                let mut rng = rng_from_seed(self.seed);
                (0..n)
                    .map(|_| rng.gen_range(-SMALL_INIT..=SMALL_INIT))
                    .collect()
            }
        }
    }
}

/// Training input: a prepared state or raw features plus how to encode them.
#[derive(Debug, Clone, PartialEq)]
pub enum TrainInput {
    State(StateVector),
    Features {
        features: Vec<f64>,
        encoding: EncodingSpec,
    },
}

impl TrainInput {
    pub fn to_state(&self) -> Result<StateVector> {
        match self {
            TrainInput::State(s) => Ok(s.clone()),
            TrainInput::Features { features, encoding } => encoding.encode_state(features),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainSample {
    pub input: TrainInput,
    pub label: Option<f64>,
}

impl TrainSample {
    pub fn new(input: StateVector, label: Option<f64>) -> Self {
        Self {
            input: TrainInput::State(input),
            label,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Mean cost over the data at the start of the epoch.
    pub loss: f64,
    /// Fraction of correct predictions, for labeled reductions.
    pub accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    /// Parameters that achieved the lowest recorded loss.
    pub params: Vec<f64>,
    pub best_epoch: usize,
    pub loss_trace: Vec<EpochRecord>,
}

impl TrainOutcome {
    /// Writes `epoch,loss,accuracy` rows; accuracy is empty when undefined.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("epoch,loss,accuracy\n");
        for r in &self.loss_trace {
            let acc = r.accuracy.map(|a| a.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{}\n", r.epoch, r.loss, acc));
        }
        out
    }
}

struct Prepared {
    state: StateVector,
    label: Option<f64>,
}

fn prepare(data: &[TrainSample]) -> Result<Vec<Prepared>> {
    data.iter()
        .map(|s| {
            Ok(Prepared {
                state: s.input.to_state()?,
                label: s.label,
            })
        })
        .collect()
}

/// Mean loss and accuracy of `params` over `data`, without gradients.
pub fn evaluate_dataset(
    spec: &CostSpec,
    params: &[f64],
    data: &[TrainSample],
) -> Result<(f64, Option<f64>)> {
    let prepared = prepare(data)?;
    let rows: Vec<(f64, Option<bool>)> = prepared
        .par_iter()
        .map(|p| {
            let e = spec.expectations(params, &p.state)?;
            let loss = spec.postproc.apply(&e, p.label)?;
            Ok((loss, p.label.and_then(|y| spec.postproc.is_correct(&e, y))))
        })
        .collect::<Result<_>>()?;
    Ok(summarize(&rows))
}

fn summarize(rows: &[(f64, Option<bool>)]) -> (f64, Option<f64>) {
    let n = rows.len() as f64;
    let loss = rows.iter().map(|r| r.0).sum::<f64>() / n;
    let graded: Vec<bool> = rows.iter().filter_map(|r| r.1).collect();
    let acc = (!graded.is_empty())
        .then(|| graded.iter().filter(|&&c| c).count() as f64 / graded.len() as f64);
    (loss, acc)
}

/// Minimizes the mean cost over `data` with full-batch parameter-shift gradients.
///
/// Per-sample work runs in parallel but is reduced in sample order, so the loss
/// trace is bitwise reproducible for a fixed config.
pub fn train(spec: &CostSpec, data: &[TrainSample], config: &TrainConfig) -> Result<TrainOutcome> {
    config.validate()?;
    if data.is_empty() {
        return Err(Error::validation("training data is empty"));
    }
    let prepared = prepare(data)?;
    let n = spec.n_slots();
    let mut params = config.initial_params(n);
    let mut m = vec![0.0; n];
    let mut v = vec![0.0; n];

    let mut trace = Vec::with_capacity(config.epochs);
    let mut best: Option<(f64, usize, Vec<f64>)> = None;

    for epoch in 0..config.epochs {
        let per_sample: Vec<(f64, Option<bool>, Vec<f64>)> = prepared
            .par_iter()
            .map(|p| {
                let (e, grad, _) = value_and_gradient(spec, &params, &p.state, p.label)?;
                let loss = spec.postproc.apply(&e, p.label)?;
                let correct = p.label.and_then(|y| spec.postproc.is_correct(&e, y));
                Ok((loss, correct, grad))
            })
            .collect::<Result<_>>()?;

        let rows: Vec<(f64, Option<bool>)> = per_sample.iter().map(|r| (r.0, r.1)).collect();
        let (loss, accuracy) = summarize(&rows);
        if !loss.is_finite() {
            return Err(Error::Training {
                epoch,
                reason: format!("loss became {loss}"),
            });
        }
        trace.push(EpochRecord {
            epoch,
            loss,
            accuracy,
        });
        if best.as_ref().is_none_or(|(l, _, _)| loss < *l) {
            best = Some((loss, epoch, params.clone()));
        }

        let scale = 1.0 / prepared.len() as f64;
        let mut grad = vec![0.0; n];
        for (_, _, g) in &per_sample {
            for (acc, gi) in grad.iter_mut().zip(g) {
                *acc += gi * scale;
            }
        }
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::Training {
                epoch,
                reason: "gradient is not finite".into(),
            });
        }

        match config.optimizer {
            Optimizer::Sgd => {
                for (p, g) in params.iter_mut().zip(&grad) {
                    *p -= config.learning_rate * g;
                }
            }
            Optimizer::Adam => {
                let t = (epoch + 1) as i32;
                let c1 = 1.0 - ADAM_BETA1.powi(t);
                let c2 = 1.0 - ADAM_BETA2.powi(t);
                for i in 0..n {
                    m[i] = ADAM_BETA1 * m[i] + (1.0 - ADAM_BETA1) * grad[i];
                    v[i] = ADAM_BETA2 * v[i] + (1.0 - ADAM_BETA2) * grad[i] * grad[i];
                    let mh = m[i] / c1;
                    let vh = v[i] / c2;
                    params[i] -= config.learning_rate * mh / (vh.sqrt() + ADAM_EPS);
                }
            }
        }
    }

    let (_, best_epoch, params) = best.expect("at least one epoch ran");
    Ok(TrainOutcome {
        params,
        best_epoch,
        loss_trace: trace,
    })
}
