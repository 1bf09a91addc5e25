use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use degdist::dist::sample_values;
use degdist::experiments::{influence_curve, CascadeConfig, CascadeModel, GraphLabel};
use degdist::fit::{fit, reverse_log_likelihood};
use degdist::graph::{ceil_degree, configuration_model};
use degdist::tail::xi_pln;
use degdist::{DegreeSample, GridConfig, ModelKind, ModelSpec};

fn ceiled(n: usize) -> Vec<u64> {
    let m = ModelSpec::pln(2.0, 2.0, 1.0).unwrap();
    let mut v: Vec<u64> = sample_values(&m, n, 1).unwrap().iter().map(|&x| ceil_degree(x, n as u64 - 1)).collect();
    if v.iter().sum::<u64>() % 2 == 1 {
        v[0] += 1;
    }
    v
}

fn likelihood(c: &mut Criterion) {
    let s = DegreeSample::from_degrees(&ceiled(100_000)).unwrap();
    let m = ModelSpec::pln(2.0, 2.0, 1.0).unwrap();
    c.bench_function("pln_likelihood_1e5", |b| b.iter(|| reverse_log_likelihood(black_box(&m), &s)));
    c.bench_function("xi_pln", |b| b.iter(|| xi_pln(black_box(5.0), 1.0, 0.1)));
}

fn fitting(c: &mut Criterion) {
    let s = DegreeSample::from_degrees(&ceiled(20_000)).unwrap();
    let grid = GridConfig::default();
    let mut g = c.benchmark_group("fit");
    g.sample_size(10);
    g.bench_function("pln_grid_2e4", |b| b.iter(|| fit(&s, ModelKind::Pln, &grid).unwrap()));
    g.finish();
}

fn graphs(c: &mut Criterion) {
    let seq = ceiled(100_000);
    let mut g = c.benchmark_group("graph");
    g.sample_size(10);
    g.bench_function("configuration_model_1e5", |b| b.iter(|| configuration_model(&seq, 2).unwrap()));
    let (graph, _) = configuration_model(&seq, 2).unwrap();
    let cfg = CascadeConfig {
        model: CascadeModel::IndependentCascade { p: 0.05 },
        trials: 20,
        seed: 3,
        seed_counts: vec![10, 100],
    };
    g.bench_function("independent_cascade_1e5", |b| b.iter(|| influence_curve(&graph, &cfg, GraphLabel::Real).unwrap()));
    g.finish();
}

criterion_group!(benches, likelihood, fitting, graphs);
criterion_main!(benches);
