use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use expansion_entanglement::{
    check_grid, entanglement_spectrum_with, CosmologyParams, Execution, IntegrationConfig, ModeSpec,
};

const STRATEGIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn spectrum(c: &mut Criterion) {
    let params = CosmologyParams::new(1.0, 1.0, 1.0).unwrap();
    let ks: Vec<f64> = (0..100_000).map(|i| i as f64 * 1e-4).collect();
    let mut group = c.benchmark_group("spectrum_100k");
    for (name, exec) in STRATEGIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| entanglement_spectrum_with(&params, black_box(&ks), exec).unwrap())
        });
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let mut cases = Vec::new();
    for &eps in &[0.1, 1.0, 3.0] {
        for &sigma in &[0.3, 1.0, 10.0] {
            for &k in &[0.0, 0.5, 2.0] {
                cases.push((CosmologyParams::new(eps, sigma, 1.0).unwrap(), ModeSpec::new(k).unwrap()));
            }
        }
    }
    let config = IntegrationConfig::default();
    let mut group = c.benchmark_group("oracle_grid_27");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| check_grid(black_box(&cases), &config, exec))
        });
    }
    group.finish();
}

criterion_group!(benches, spectrum, oracle);
criterion_main!(benches);
