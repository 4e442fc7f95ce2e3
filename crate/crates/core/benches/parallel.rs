//! Compares the operators on a one-thread pool against the default pool.
//! Build with `--no-default-features` to measure the sequential fallback.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hcontent::choquet::{Backend, Content};
use hcontent::operators::{maximal_centered, riesz_potential, RadiusLadder};
use hcontent::verify::{generate, InstanceKind, InstanceSpec};
use hcontent::GridFunction;

fn input(level: u32) -> GridFunction {
    let spec = InstanceSpec {
        kind: InstanceKind::RandomSimple,
        n: 2,
        level,
        coarse_level: None,
        value_range: (0.1, 1.0),
        seed: 11,
    };
    generate(&spec).unwrap()
}

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    vec![
        ("1-thread", rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap()),
        ("default", rayon::ThreadPoolBuilder::new().build().unwrap()),
    ]
}

fn operators(c: &mut Criterion) {
    let f = input(4);
    let ladder = RadiusLadder::standard(f.grid());
    let mut group = c.benchmark_group("operators");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new("maximal_centered", name), |b| {
            b.iter(|| {
                pool.install(|| {
                    // fresh content each time, so the memo does not carry over
                    let content = Content::new(f.grid(), 1.5, Backend::DyadicExact).unwrap();
                    maximal_centered(&f, &content, 0.25, &ladder).unwrap()
                })
            })
        });
        group.bench_function(BenchmarkId::new("riesz_potential", name), |b| {
            b.iter(|| {
                pool.install(|| {
                    let content = Content::new(f.grid(), 1.5, Backend::DyadicExact).unwrap();
                    riesz_potential(&f, &content, 0.5, None).unwrap()
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, operators);
criterion_main!(benches);
