use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use floorsum::par::Exec;
use floorsum::range::{enumerate_range_with, Method};

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_range");
    group.sample_size(10);
    for n in [50u64, 100, 200] {
        for (label, method, exec) in [
            ("delta-parallel", Method::DeltaWalk, Exec::Parallel),
            ("delta-sequential", Method::DeltaWalk, Exec::Sequential),
            ("naive-parallel", Method::Naive, Exec::Parallel),
            ("naive-sequential", Method::Naive, Exec::Sequential),
        ] {
            group.bench_with_input(BenchmarkId::new(label, n), &n, |b, &n| {
                b.iter(|| enumerate_range_with(n, method, exec).unwrap());
            });
        }
    }
    group.finish();
}

criterion_group!(benches, enumeration);
criterion_main!(benches);
