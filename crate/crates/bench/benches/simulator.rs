use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use qmlsim::circuit::{execute_in_place, GateKind};
use qmlsim::exec::{run_batch, template_jobs, Batch};
use qmlsim::sim::{gates, Parallelism};
use qmlsim::StateVector;
use qmlsim_bench::{fused, layered, rotation_runs};

fn single_gate(c: &mut Criterion) {
    let mut group = c.benchmark_group("gate");
    for n in [10usize, 14, 18] {
        group.throughput(Throughput::Elements(1 << n));
        let mut state = StateVector::zero(n).unwrap();
        let h = gates::h();
        group.bench_with_input(BenchmarkId::new("h", n), &n, |b, &n| {
            b.iter(|| state.apply_gate(&h, &[n / 2], &[]).unwrap())
        });
        let cx = GateKind::Cnot.matrix(&[]);
        group.bench_with_input(BenchmarkId::new("cnot", n), &n, |b, &n| {
            b.iter(|| state.apply_gate(&cx, &[n - 1], &[0]).unwrap())
        });
    }
    group.finish();
}

fn fusion(c: &mut Criterion) {
    let mut group = c.benchmark_group("fusion");
    let n = 14;
    let circuit = rotation_runs(n, 16);
    for (label, circ) in [
        ("unfused", circuit.clone()),
        ("max2", fused(&circuit, 2)),
        ("max4", fused(&circuit, 4)),
    ] {
        group.bench_function(label, |b| {
            let mut state = StateVector::zero(n).unwrap();
            b.iter(|| execute_in_place(&circ, &mut state, None, Parallelism::Sequential).unwrap())
        });
    }
    group.finish();
}

fn layers(c: &mut Criterion) {
    let mut group = c.benchmark_group("layer");
    for n in [8usize, 12, 16] {
        let circ = layered(n, 1);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            let mut state = StateVector::zero(n).unwrap();
            b.iter(|| execute_in_place(&circ, &mut state, None, Parallelism::Sequential).unwrap())
        });
    }
    group.finish();
}

fn batches(c: &mut Criterion) {
    let mut group = c.benchmark_group("batch");
    group.sample_size(10);
    let jobs = template_jobs(12, 1, 64, 0).unwrap();
    for workers in [1usize, 2, 4] {
        let batch = Batch::new(jobs.clone(), workers).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(workers), &batch, |b, batch| {
            b.iter(|| run_batch(batch).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, single_gate, fusion, layers, batches);
criterion_main!(benches);
