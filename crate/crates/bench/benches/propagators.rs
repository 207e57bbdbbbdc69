use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qsampler_core::harper::default_n_tau;
use qsampler_core::samplers::substream;
use qsampler_core::{
    drift_propagator, eigenphases, floquet_propagator, frame_potentials, haar_unitary, op_decompose,
    sample_pair_traces, DriftSchedule, HarperParams, Sampler,
};

fn propagators(c: &mut Criterion) {
    let mut group = c.benchmark_group("propagator");
    group.sample_size(20);
    for n in [31, 51, 81] {
        let p = HarperParams::u_ta(n);
        group.bench_with_input(BenchmarkId::new("floquet", n), &p, |b, p| {
            b.iter(|| floquet_propagator(black_box(p), default_n_tau(p.n)).unwrap())
        });
    }
    let schedule = DriftSchedule::u_drift(51);
    group.bench_function("drift/51", |b| {
        b.iter(|| drift_propagator(black_box(&schedule), default_n_tau(51)).unwrap())
    });
    group.bench_function("haar/51", |b| {
        let mut rng = substream(0, 0);
        b.iter(|| haar_unitary(51, &mut rng))
    });
    group.finish();
}

fn analysis(c: &mut Criterion) {
    let u = floquet_propagator(&HarperParams::u_ta(51), default_n_tau(51)).unwrap();
    c.bench_function("eigenphases/51", |b| b.iter(|| eigenphases(black_box(&u))));
    c.bench_function("op_decompose/51", |b| b.iter(|| op_decompose(black_box(u.matrix())).unwrap()));

    let z: Vec<f64> = (0..10_000).map(|i| (i % 97) as f64 * 0.03).collect();
    c.bench_function("frame_potentials/10k", |b| {
        b.iter(|| frame_potentials(black_box(&z), &[1, 2, 3]).unwrap())
    });

    let mut group = c.benchmark_group("pair_traces");
    group.sample_size(10);
    group.bench_function("haar/51x16", |b| {
        b.iter(|| sample_pair_traces(&Sampler::Haar { n: 51 }, 16, 1, 1).unwrap())
    });
    group.finish();
}

criterion_group!(benches, propagators, analysis);
criterion_main!(benches);
