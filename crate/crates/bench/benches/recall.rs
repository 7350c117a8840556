use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use feelsim_core::rng::{stream, KeyedStreams};
use feelsim_core::scenario::builtin;
use feelsim_core::{
    make_cue, recall_probability, recall_probability_enum, retrieve, run_implicit_loop,
    run_scenario, store_trace, CueSpec, LoopConfig, NoiseModel, Trace,
};

fn probability(c: &mut Criterion) {
    let spec = CueSpec::new(NoiseModel::Flip, 0.6).unwrap();
    let mut group = c.benchmark_group("recall_probability");
    for n in [8usize, 12, 16] {
        group.bench_with_input(BenchmarkId::new("analytic", n), &n, |b, &n| {
            b.iter(|| recall_probability(black_box(n), spec, 0.25).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("enumerated", n), &n, |b, &n| {
            b.iter(|| recall_probability_enum(black_box(n), spec, 0.25).unwrap())
        });
    }
    group.finish();
}

fn retrieval(c: &mut Criterion) {
    let trace = Trace::random(64, &mut stream(1, &[])).unwrap();
    let cell = store_trace("c", trace.clone(), 0.25).unwrap();
    let spec = CueSpec::new(NoiseModel::Flip, 0.7).unwrap();
    let mut rng = stream(2, &[]);
    c.bench_function("make_cue+retrieve n=64", |b| {
        b.iter(|| {
            let cue = make_cue(&trace, spec, &mut rng);
            retrieve(&cell, black_box(&cue)).unwrap()
        })
    });

    let cfg = LoopConfig::new(10.0, 0.5, 0.0).unwrap();
    let streams = KeyedStreams::new(3, &[]);
    let weak = CueSpec::new(NoiseModel::Flip, 0.3).unwrap();
    c.bench_function("implicit loop n=64", |b| {
        b.iter(|| run_implicit_loop(&cell, weak, &cfg, &streams, 0.0, &mut ()).unwrap())
    });
}

fn scenarios(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_scenario");
    group.sample_size(10);
    for name in builtin::NAMES {
        let cfg = builtin::get(name).unwrap();
        group.bench_function(name, |b| b.iter(|| run_scenario(black_box(&cfg)).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, probability, retrieval, scenarios);
criterion_main!(benches);
