//! Acceptance checks, one line per criterion. Runs without the libtest harness so the
//! report is always printed; exits nonzero if any check fails.

mod common;

use common::{random_circuit, random_state};
use qmlsim::bosonic::{
    apply_recd_block, displacement, ecd, encode_tokens, encode_tokens_traced,
    optimize_token_params_traced, qubit_rotation, state_overlap, tokenize_smiles, vacuum,
    HybridState, QumodeConfig, TokenDictionary, TokenParams,
};
use qmlsim::circuit::{self, fuse, ExecutionStats, FusionCostModel};
use qmlsim::encoding::{angle_normalize, basis_encode, EncodingSpec};
use qmlsim::exec::{est_memory, run_batch, template_jobs, Batch, JobMode};
use qmlsim::linalg::{ONE, ZERO};
use qmlsim::rng::rng_from_seed;
use qmlsim::sim::{gates, sample_shots};
use qmlsim::variational::{
    build_qcnn, evaluate_cost, evaluate_dataset, parameter_shift_gradient, train, CostSpec, Init,
    Optimizer, PostProcess, TrainConfig, TrainInput, TrainSample,
};
use qmlsim::{CMatrix, Circuit, Observable, StateVector, C64};
use rand::seq::SliceRandom;
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use std::f64::consts::PI;
use std::time::Instant;

enum Outcome {
    Pass(String),
    Fail(String),
    /// Precondition of the criterion is not met on this host.
    NotApplicable(String),
}

type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn round12(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

fn worked_angle_example() -> Outcome {
    let spec = EncodingSpec::angle(Default::default()).with_range(0.0, PI);
    let (angles, _) = angle_normalize(&[0.0, 5.0, 2.0], &spec).unwrap();
    let want = [0.0, PI, 2.0 * PI / 5.0];
    let ok = angles
        .iter()
        .zip(&want)
        .all(|(a, w)| round12(*a) == round12(*w));
    check(ok, format!("angles {angles:?}"))
}

fn basis_example() -> Outcome {
    let c = basis_encode(&[1, 0, 1]).unwrap();
    let out = c.execute(&StateVector::zero(3).unwrap()).unwrap();
    let amp = out.amplitudes()[0b101];
    let hist = sample_shots(&out, 1, 0).unwrap();
    let ok = (amp - ONE).norm() == 0.0 && hist.bitstring(0b101) == "101";
    check(ok, format!("amplitude of |101> = {amp}"))
}

fn memory_arithmetic() -> Outcome {
    let m30 = est_memory(30, 8);
    let m40 = est_memory(40, 8);
    let rel = (m40 as f64 - 8700e9).abs() / 8700e9;
    let ok = m30 == 8 * (1u128 << 30) && m40 == 8 * (1u128 << 40) && rel <= 0.05;
    check(
        ok,
        format!(
            "30 qubits {m30} B, 40 qubits {m40} B ({:.1}% from 8700 GB)",
            rel * 100.0
        ),
    )
}

fn gate_passes(c: &Circuit) -> usize {
    let mut stats = ExecutionStats::default();
    circuit::execute(
        c,
        &StateVector::zero(c.n_qubits()).unwrap(),
        Some(&mut stats),
    )
    .unwrap();
    stats.gate_passes
}

fn fusion_suite() -> Outcome {
    let mut rng = rng_from_seed(2024);
    let model = FusionCostModel::default();
    let mut worst = 1.0f64;
    for _ in 0..200 {
        let n = rng.gen_range(1..=10);
        let len = rng.gen_range(0..=200);
        let c = random_circuit(&mut rng, n, len, 0);
        let fused = fuse(&c, &model).unwrap();
        let s = random_state(&mut rng, n);
        let f = c
            .execute(&s)
            .unwrap()
            .fidelity(&fused.execute(&s).unwrap())
            .unwrap();
        worst = worst.min(f);
    }
    // runs of single-qubit rotations on each qubit, separated by entanglers
    let mut deep = Circuit::new(6);
    for layer in 0..10 {
        for q in 0..6 {
            for k in 0..6 {
                let a = 0.1 * (layer * 36 + q * 6 + k) as f64;
                match k % 3 {
                    0 => deep.rx(q, a),
                    1 => deep.ry(q, a),
                    _ => deep.rz(q, a),
                }
                .unwrap();
            }
        }
        for q in 0..5 {
            deep.cnot(q, q + 1).unwrap();
        }
    }
    let fused = fuse(&deep, &model).unwrap();
    let (before, after) = (gate_passes(&deep), gate_passes(&fused));
    let reduction = 1.0 - after as f64 / before as f64;
    check(
        worst >= 1.0 - 1e-10 && reduction >= 0.30,
        format!(
            "min fidelity 1-{:.1e} over 200 circuits; gate passes {before} -> {after} ({:.0}% fewer)",
            1.0 - worst,
            reduction * 100.0
        ),
    )
}

fn gradient_suite() -> Outcome {
    let mut rng = rng_from_seed(77);
    let h = 1e-5;
    let mut worst = 0.0f64;
    let mut count_ok = true;
    let posts = [
        PostProcess::Identity,
        PostProcess::Mean,
        PostProcess::MseVsLabel,
        PostProcess::CrossEntropyVsLabel,
    ];
    for i in 0..100 {
        let n = rng.gen_range(1..=4);
        let m = rng.gen_range(1..=8);
        let len = rng.gen_range(0..20);
        let ansatz = random_circuit(&mut rng, n, len, m);
        let n_obs = rng.gen_range(1..=2);
        let obs: Vec<Observable> = (0..n_obs)
            .map(|_| {
                let s: String = (0..n)
                    .map(|_| ['I', 'X', 'Y', 'Z'][rng.gen_range(0..4)])
                    .collect();
                s.parse().unwrap()
            })
            .collect();
        let post = posts[i % 4];
        let label = match post {
            PostProcess::MseVsLabel => Some(rng.gen_range(-1.0..1.0)),
            PostProcess::CrossEntropyVsLabel => Some(f64::from(rng.gen_range(0..2u8))),
            _ => None,
        };
        let spec = CostSpec::new(ansatz, obs, post).unwrap();
        let theta: Vec<f64> = (0..m).map(|_| rng.gen_range(-PI..PI)).collect();
        let input = random_state(&mut rng, n);
        let g = parameter_shift_gradient(&spec, &theta, &input, label).unwrap();
        count_ok &= g.circuit_evaluations == 2 * m * n_obs;
        for k in 0..m {
            let mut up = theta.clone();
            let mut dn = theta.clone();
            up[k] += h;
            dn[k] -= h;
            let fd = (evaluate_cost(&spec, &up, &input, label).unwrap()
                - evaluate_cost(&spec, &dn, &input, label).unwrap())
                / (2.0 * h);
            worst = worst.max((fd - g.grad[k]).abs());
        }
    }
    check(
        worst <= 1e-5 && count_ok,
        format!("max |shift - fd| = {worst:.2e} over 100 instances; evaluations = 2M per observable: {count_ok}"),
    )
}

fn parity_data() -> Vec<TrainSample> {
    (0..256usize)
        .map(|i| {
            let bits: Vec<f64> = (0..8).map(|q| ((i >> q) & 1) as f64).collect();
            let label = if bits[0] == bits[1] { 1.0 } else { -1.0 };
            TrainSample {
                input: TrainInput::Features {
                    features: bits,
                    encoding: EncodingSpec::basis(),
                },
                label: Some(label),
            }
        })
        .collect()
}

fn qcnn_training() -> Outcome {
    let (ansatz, topo) = build_qcnn(8).unwrap();
    let counts = topo.active_counts();
    let spec = CostSpec::new(
        ansatz,
        vec![topo.readout_observable()],
        PostProcess::MseVsLabel,
    )
    .unwrap();
    let mut data = parity_data();
    data.shuffle(&mut rng_from_seed(8));
    let (train_set, test_set) = data.split_at(205);

    let config = TrainConfig {
        learning_rate: 0.1,
        epochs: 100,
        optimizer: Optimizer::Adam,
        seed: 0,
        init: Init::UniformSmall,
    };
    let start = Instant::now();
    let out = train(&spec, train_set, &config).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let (_, train_acc) = evaluate_dataset(&spec, &out.params, train_set).unwrap();
    let (_, test_acc) = evaluate_dataset(&spec, &out.params, test_set).unwrap();
    let (train_acc, test_acc) = (train_acc.unwrap(), test_acc.unwrap());

    let short = train(
        &spec,
        train_set,
        &TrainConfig {
            epochs: 3,
            ..config
        },
    )
    .unwrap();
    let deterministic = short.loss_trace[..] == out.loss_trace[..3];

    check(
        train_acc >= 0.95 && test_acc >= 0.90 && deterministic && counts == [8, 4, 2, 1],
        format!(
            "train {:.3}, test {:.3}, best epoch {}, active {counts:?}, rerun identical: {deterministic}, {elapsed:.0}s",
            train_acc, test_acc, out.best_epoch
        ),
    )
}

fn bosonic_suite() -> Outcome {
    let c16 = QumodeConfig::new(16).unwrap();
    let d0 = displacement(ZERO, c16) == CMatrix::identity(16);
    let x_i = gates::x().matrix().kron(&CMatrix::identity(16));
    let ecd0 = ecd(ZERO, c16).max_abs_diff(&x_i) < 1e-15;

    let mut rng = rng_from_seed(5);
    let mut unitarity = 0.0f64;
    for _ in 0..20 {
        let beta = C64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        let (t, p) = (rng.gen_range(-PI..PI), rng.gen_range(-PI..PI));
        let block = ecd(beta, c16).matmul(&qubit_rotation(t, p).kron(&CMatrix::identity(16)));
        for m in [
            displacement(beta, c16),
            qubit_rotation(t, p),
            ecd(beta, c16),
            block,
        ] {
            unitarity = unitarity.max(m.unitarity_error());
        }
    }

    let c32 = QumodeConfig::new(32).unwrap();
    let mut mode = displacement(ONE, c32).apply(&vacuum(c32).amplitudes()[..32]);
    mode.resize(64, ZERO);
    let mean_n = HybridState::new(c32, mode).unwrap().mean_photon_number();
    let flipped = apply_recd_block(&vacuum(c16), 0.0, 0.0, ZERO, c16).unwrap();
    let ecd0 = ecd0 && flipped.amplitude(1, 0) == ONE;

    let mut dict = TokenDictionary::new();
    dict.insert("N", TokenParams::new(0.9, 0.1, C64::new(0.4, 0.2)))
        .unwrap();
    dict.insert("C", TokenParams::new(0.3, 1.2, C64::new(-0.5, 0.3)))
        .unwrap();
    let tokens = tokenize_smiles("NCC", None).unwrap();
    let (_, trace) = encode_tokens_traced(&tokens, &dict, c16).unwrap();

    check(
        d0 && ecd0 && unitarity <= 1e-10 && (mean_n - 1.0).abs() <= 1e-3 && trace == ["N", "C", "C"],
        format!(
            "D(0)=I {d0}, ECD(0)=X⊗I {ecd0}, max unitarity error {unitarity:.1e}, <n> of D(1)|0> = {mean_n:.6}, NCC trace {trace:?}"
        ),
    )
}

fn token_optimization() -> Outcome {
    let config = QumodeConfig::default();
    let mut dict = TokenDictionary::new();
    for t in ["C", "N", "O", "="] {
        dict.insert(t, TokenParams::new(0.8, 0.4, C64::new(0.5, 0.0)))
            .unwrap();
    }
    let corpus: Vec<Vec<String>> = ["CCO", "NCC", "CNO", "C=O", "OCCN"]
        .iter()
        .map(|s| tokenize_smiles(s, None).unwrap())
        .collect();
    let train_cfg = TrainConfig {
        learning_rate: 0.2,
        epochs: 50,
        optimizer: Optimizer::Sgd,
        seed: 1,
        init: Init::Zeros,
    };
    let start = Instant::now();
    let (out, trace) = optimize_token_params_traced(&dict, &corpus, config, &train_cfg).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let monotone = trace.windows(2).all(|w| w[1] <= w[0]);
    let strict_steps = trace.windows(2).filter(|w| w[1] < w[0]).count();
    let (first, last) = (trace[0], *trace.last().unwrap());
    let a = encode_tokens(&corpus[0], &out, config).unwrap();
    let self_overlap = state_overlap(&a, &a).unwrap();
    check(
        monotone && last < first && (self_overlap - ONE).norm() < 1e-10,
        format!(
            "loss {first:.4} -> {last:.4} over {} steps ({strict_steps} strictly decreasing), {elapsed:.1}s",
            trace.len() - 1
        ),
    )
}

fn batch_scaling() -> Outcome {
    let mut jobs = template_jobs(8, 2, 1000, 3).unwrap();
    for (i, j) in jobs.iter_mut().enumerate() {
        if i % 4 == 0 {
            j.mode = JobMode::Shots {
                count: 100,
                seed: 0,
            };
        }
    }
    let mut one = Batch::new(jobs, 1).unwrap();
    one.seed_shots(99);
    let mut four = one.clone();
    four.workers = 4;
    let same = run_batch(&one).unwrap() == run_batch(&four).unwrap();

    let heavy = template_jobs(16, 1, 1000, 4).unwrap();
    let time = |workers| {
        let b = Batch::new(heavy.clone(), workers).unwrap();
        let start = Instant::now();
        let out = run_batch(&b).unwrap();
        assert!(out.iter().all(|r| r.is_ok()));
        start.elapsed().as_secs_f64()
    };
    let t1 = time(1);
    let t4 = time(4);
    let speedup = t1 / t4;
    let cores = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    let detail = format!(
        "1 vs 4 workers identical on 1000 mixed jobs: {same}; 16-qubit throughput {speedup:.2}x at 4 workers ({t1:.2}s vs {t4:.2}s) on {cores} core(s)"
    );
    if !same {
        Outcome::Fail(detail)
    } else if cores < 4 {
        Outcome::NotApplicable(format!(
            "{detail}; throughput needs a host with at least 4 cores"
        ))
    } else {
        check(speedup >= 2.5, detail)
    }
}

fn bell_sampling() -> Outcome {
    let mut c = Circuit::new(2);
    c.h(0).unwrap().cnot(0, 1).unwrap();
    let bell = c.execute(&StateVector::zero(2).unwrap()).unwrap();
    let hist = sample_shots(&bell, 10_000, 7).unwrap();
    let (n00, n11) = (hist.get(0b00) as f64, hist.get(0b11) as f64);
    let only_correlated = hist.counts().keys().all(|&k| k == 0b00 || k == 0b11);
    let expected = 5000.0;
    let stat = ((n00 - expected).powi(2) + (n11 - expected).powi(2)) / expected;
    let p = ChiSquared::new(1.0).unwrap().sf(stat);
    check(
        only_correlated && p > 0.001,
        format!("00: {n00}, 11: {n11}, chi2 = {stat:.3}, p = {p:.3}"),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("angle normalization worked example", worked_angle_example),
        ("basis encoding example", basis_example),
        ("memory arithmetic", memory_arithmetic),
        ("fusion soundness", fusion_suite),
        ("parameter-shift gradients", gradient_suite),
        ("QCNN parity training", qcnn_training),
        ("bosonic operators and token trace", bosonic_suite),
        ("token parameter optimization", token_optimization),
        ("batch determinism and scaling", batch_scaling),
        ("Bell sampling statistics", bell_sampling),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let (tag, detail) = match f() {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Outcome::NotApplicable(d) => ("N/A ", d),
        };
        println!(
            "{tag} {name} [{:.1}s]: {detail}",
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} acceptance check(s) failed");
        std::process::exit(1);
    }
}
