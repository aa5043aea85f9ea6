use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use forge_bench::{cube_graph, sl2_graph};
use forge_core::ffield::Field;
use forge_core::gensets::sl2_standard;
use forge_core::groups::{enumerate_group, DEFAULT_CAP};
use forge_core::spectral::{lanczos_lambda2, matvec, LanczosOptions};

fn bench_matvec(c: &mut Criterion) {
    let mut group = c.benchmark_group("matvec");
    for (name, g) in [("sl2_13", sl2_graph(13)), ("cube_7_4", cube_graph(7, 4))] {
        let x: Vec<f64> = (0..g.n()).map(|i| (i as f64).sin()).collect();
        let mut y = vec![0.0; g.n()];
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| matvec(&g, black_box(&x), &mut y))
        });
    }
    group.finish();
}

fn bench_enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate");
    group.sample_size(10);
    for p in [7u64, 13] {
        let gens = sl2_standard(&Field::prime(p).unwrap()).group_elements();
        group.bench_function(BenchmarkId::new("sl2", p), |b| {
            b.iter(|| enumerate_group(black_box(&gens), DEFAULT_CAP).unwrap().order())
        });
    }
    group.finish();
}

fn bench_lanczos(c: &mut Criterion) {
    let mut group = c.benchmark_group("lanczos");
    group.sample_size(10);
    let opts = LanczosOptions::default();
    for (name, g) in [("sl2_13", sl2_graph(13)), ("cube_7_4", cube_graph(7, 4))] {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| lanczos_lambda2(&g, &opts).unwrap().lambda2)
        });
    }
    group.finish();
}

criterion_group!(benches, bench_matvec, bench_enumeration, bench_lanczos);
criterion_main!(benches);
