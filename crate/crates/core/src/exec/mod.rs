//! Batched job execution on a worker pool, and the qubit-scaling benchmark.
//!
//! A job owns its whole state vector and runs single-threaded; parallelism comes
//! only from running jobs side by side. Results keep submission order and each
//! job's randomness comes from its own seed, so output never depends on the
//! worker count.

use crate::circuit::{self, Circuit, ExecutionStats};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed};
use crate::sim::kernel::Parallelism;
use crate::sim::measure::{sample_shots, ShotHistogram};
use crate::sim::pauli::{Observable, PauliString};
use crate::sim::state::{StateVector, DEFAULT_MAX_QUBITS};
use rand::Rng;
use rayon::prelude::*;
use std::fmt::Write as _;
use std::time::Instant;

/// Bytes per amplitude assumed by memory estimates (single-precision complex).
pub const AMPLITUDE_BYTES: u64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JobMode {
    Expectation,
    Shots { count: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Job {
    pub circuit: Circuit,
    pub params: Vec<f64>,
    pub observable: Observable,
    pub mode: JobMode,
}

impl Job {
    pub fn expectation(circuit: Circuit, params: Vec<f64>, observable: Observable) -> Self {
        Self {
            circuit,
            params,
            observable,
            mode: JobMode::Expectation,
        }
    }

    pub fn shots(circuit: Circuit, params: Vec<f64>, count: u64, seed: u64) -> Self {
        let n = circuit.n_qubits();
        Self {
            circuit,
            params,
            observable: Observable::single(PauliString::identity(n)),
            mode: JobMode::Shots { count, seed },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.params.len() != self.circuit.n_slots() {
            return Err(Error::validation(format!(
                "job has {} parameter(s) for {} slot(s)",
                self.params.len(),
                self.circuit.n_slots()
            )));
        }
        if self.mode == JobMode::Expectation
            && self.observable.n_qubits() != self.circuit.n_qubits()
        {
            return Err(Error::validation(format!(
                "observable width {} does not match circuit width {}",
                self.observable.n_qubits(),
                self.circuit.n_qubits()
            )));
        }
        Ok(())
    }

    /// Runs the job on the calling thread.
    pub fn run(&self) -> Result<JobOutput> {
        self.validate()?;
        let bound = self.circuit.bind_parameters(&self.params)?;
        let mut state = StateVector::zero(bound.n_qubits())?;
        circuit::execute_in_place(&bound, &mut state, None, Parallelism::Sequential)?;
        match self.mode {
            JobMode::Expectation => {
                Ok(JobOutput::Expectation(self.observable.expectation(&state)?))
            }
            JobMode::Shots { count, seed } => {
                Ok(JobOutput::Histogram(sample_shots(&state, count, seed)?))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum JobOutput {
    Expectation(f64),
    Histogram(ShotHistogram),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub jobs: Vec<Job>,
    pub workers: usize,
}

impl Batch {
    pub fn new(jobs: Vec<Job>, workers: usize) -> Result<Self> {
        let b = Self { jobs, workers };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::validation("a batch needs at least one worker"));
        }
        Ok(())
    }

    /// Reseeds every shot job from `master`: job `i` gets `derive_seed(master, i)`.
    pub fn seed_shots(&mut self, master: u64) {
        for (i, job) in self.jobs.iter_mut().enumerate() {
            if let JobMode::Shots { seed, .. } = &mut job.mode {
                *seed = derive_seed(master, i as u64);
            }
        }
    }
}

/// Runs every job on a pool of `batch.workers` threads.
///
/// A failing job yields an error in its own slot and does not stop the others.
pub fn run_batch(batch: &Batch) -> Result<Vec<Result<JobOutput>>> {
    batch.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(batch.workers)
        .build()
        .map_err(|e| Error::validation(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| batch.jobs.par_iter().map(Job::run).collect()))
}

/// `amplitude_bytes · 2^n`.
pub fn est_memory(n_qubits: u32, amplitude_bytes: u64) -> u128 {
    (amplitude_bytes as u128) << n_qubits
}

/// One benchmark layer per repetition: `Ry` on every qubit, then a ring of CNOTs.
pub fn layer_template(n_qubits: usize, layers: usize) -> Result<Circuit> {
    let mut c = Circuit::with_slots(n_qubits, n_qubits * layers);
    for l in 0..layers {
        for q in 0..n_qubits {
            c.ry(q, crate::circuit::Param::slot(l * n_qubits + q))?;
        }
        if n_qubits > 1 {
            for q in 0..n_qubits {
                let t = (q + 1) % n_qubits;
                if n_qubits == 2 && q == 1 {
                    break;
                }
                c.cnot(q, t)?;
            }
        }
    }
    Ok(c)
}

/// Expectation jobs of `⟨Z0⟩` on the layer template with seeded random angles.
pub fn template_jobs(n_qubits: usize, layers: usize, n_jobs: usize, seed: u64) -> Result<Vec<Job>> {
    let c = layer_template(n_qubits, layers)?;
    let obs = Observable::single(PauliString::z(n_qubits, 0));
    Ok((0..n_jobs)
        .map(|i| {
            let mut rng = rng_from_seed(derive_seed(seed, i as u64));
            let params = (0..c.n_slots())
                .map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
                .collect();
            Job::expectation(c.clone(), params, obs.clone())
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub qubits: std::ops::RangeInclusive<usize>,
    pub layers: usize,
    pub jobs: usize,
    pub workers: Vec<usize>,
    /// Rows above this width are reported but not run.
    pub max_qubits: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            qubits: 4..=12,
            layers: 1,
            jobs: 100,
            workers: vec![1],
            max_qubits: DEFAULT_MAX_QUBITS,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n_qubits: usize,
    pub n_jobs: usize,
    pub workers: usize,
    /// `None` when the row was skipped.
    pub wall_seconds: Option<f64>,
    pub gate_passes: u64,
    pub est_memory_bytes: u128,
}

impl BenchRow {
    pub fn skipped(&self) -> bool {
        self.wall_seconds.is_none()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "n_qubits,n_jobs,workers,wall_seconds,gate_passes,est_memory_bytes,status\n",
        );
        for r in &self.rows {
            let (wall, status) = match r.wall_seconds {
                Some(w) => (format!("{w:.6}"), "ok"),
                None => (String::new(), "skipped"),
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.n_qubits, r.n_jobs, r.workers, wall, r.gate_passes, r.est_memory_bytes, status
            );
        }
        out
    }
}

/// Times `jobs` template jobs for every width and worker count.
pub fn bench_scaling(config: &BenchConfig) -> Result<BenchReport> {
    if config.workers.is_empty() || config.workers.contains(&0) {
        return Err(Error::validation(
            "worker counts must be nonempty and positive",
        ));
    }
    if config.layers == 0 || config.jobs == 0 {
        return Err(Error::validation("layers and jobs must be at least 1"));
    }
    let mut report = BenchReport::default();
    for n in config.qubits.clone() {
        if n == 0 {
            return Err(Error::validation("qubit range must start at 1"));
        }
        let mem = est_memory(n as u32, AMPLITUDE_BYTES);
        let runnable = n <= config.max_qubits;
        let jobs = if runnable {
            template_jobs(n, config.layers, config.jobs, config.seed)?
        } else {
            Vec::new()
        };
        let passes_per_job = layer_template(n, config.layers)?.len() as u64;
        for &workers in &config.workers {
            let mut row = BenchRow {
                n_qubits: n,
                n_jobs: config.jobs,
                workers,
                wall_seconds: None,
                gate_passes: 0,
                est_memory_bytes: mem,
            };
            if runnable {
                let batch = Batch::new(jobs.clone(), workers)?;
                let start = Instant::now();
                let results = run_batch(&batch)?;
                let wall = start.elapsed().as_secs_f64();
                if let Some(e) = results.into_iter().find_map(|r| r.err()) {
                    return Err(e);
                }
                row.wall_seconds = Some(wall);
                row.gate_passes = passes_per_job * config.jobs as u64;
            }
            report.rows.push(row);
        }
    }
    Ok(report)
}

/// Gate passes a bound circuit takes, without running it twice.
pub fn count_gate_passes(circuit: &Circuit) -> Result<u64> {
    let mut stats = ExecutionStats::default();
    let state = StateVector::zero(circuit.n_qubits())?;
    circuit::execute(circuit, &state, Some(&mut stats))?;
    Ok(stats.gate_passes as u64)
}
