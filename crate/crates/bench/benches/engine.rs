use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use geodesy_core::verify::{self, Model};
use geodesy_core::{el_residual, emt};

fn residual(c: &mut Criterion) {
    let mut group = c.benchmark_group("el_residual");
    for model in Model::ALL {
        for n in [65, 129] {
            let map = verify::exact_map(model, n).unwrap();
            group.bench_with_input(BenchmarkId::new(model.name(), n), &map, |b, map| b.iter(|| el_residual(map).unwrap()));
        }
    }
    group.finish();
}

fn tensor(c: &mut Criterion) {
    let mut group = c.benchmark_group("emt");
    for model in Model::ALL {
        let map = verify::exact_map(model, 129).unwrap();
        group.bench_with_input(BenchmarkId::new(model.name(), 129), &map, |b, map| b.iter(|| emt(map)));
    }
    group.finish();
}

fn threads(c: &mut Criterion) {
    let map = verify::exact_map(Model::Axisym, 257).unwrap();
    let mut group = c.benchmark_group("el_residual_threads");
    for t in [1, 4] {
        group.bench_function(BenchmarkId::from_parameter(t), |b| {
            geodesy_core::set_threads(t);
            b.iter(|| el_residual(&map).unwrap())
        });
    }
    group.finish();
    geodesy_core::set_threads(1);
}

criterion_group!(benches, residual, tensor, threads);
criterion_main!(benches);
